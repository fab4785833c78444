#include "bsq/brackets.hpp"

#include <algorithm>
#include <set>

#include "bsq/variational.hpp"

namespace bsq {

namespace {

long long gcd_ll(long long a, long long b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a == 0 ? 1 : a;
}

Fraction make_fraction(long long num, long long den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = gcd_ll(num, den);
  return {num / g, den / g};
}

SpectralState basis_state(Kind kind, const ModeIndex& j, int parity, int n_trunc) {
  return basis_vector({kind, j, parity & 1}, n_trunc);
}

void require_headroom(int needed, int n_trunc, const char* who) {
  if (needed > n_trunc)
    throw TruncationOverflow(std::string(who) + ": product modes up to " +
                             std::to_string(needed) + " exceed n_trunc = " +
                             std::to_string(n_trunc));
}

int sgn_pow(int e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace

VectorField const_field(const SpectralState& value, std::string descriptor) {
  return {[value](const SpectralState&) { return value; }, true, std::move(descriptor)};
}

VectorField drift_field(const PhysParams& p) {
  return {[p](const SpectralState& u) { return drift_F(u, p); }, false, "F"};
}

SpectralState bracket_fd(const VectorField& e1, const VectorField& e2, const SpectralState& u,
                         double h) {
  if (!(h > 0.0)) throw std::invalid_argument("bracket_fd: h must be positive");
  SpectralState out = directional_fd(e2, u, e1(u), h);
  out -= directional_fd(e1, u, e2(u), h);
  return out;
}

SpectralState directional_fd(const VectorField& e, const SpectralState& u,
                             const SpectralState& x, double h) {
  SpectralState hp = u, hm = u;
  SpectralState hx = x;
  hx *= h;
  hp += hx;
  hm -= hx;
  SpectralState out = e(hp);
  out -= e(hm);
  out *= 1.0 / (2.0 * h);
  return out;
}

SpectralState LinComb::materialize(int n_trunc) const {
  SpectralState out(n_trunc);
  for (const auto& [b, c] : terms) out.coeff(b.index, b.slot()) += c;
  return out;
}

SpectralState field_Y(const ModeIndex& j, int m, const SpectralState& u, const PhysParams& p) {
  m &= 1;
  const int nt = u.n_trunc();
  if (!u.trunc().contains(j)) throw TruncationOverflow("field_Y: mode outside truncation");
  SpectralState out = basis_state(Kind::Sigma, j, m, nt);
  out *= p.nu2 * j.norm2();
  SpectralState psi = basis_state(Kind::Psi, j, (m + 1) & 1, nt);
  psi *= sgn_pow(m) * p.g * j.j1;
  out += psi;
  out += advect_B(u, basis_state(Kind::Sigma, j, m, nt));
  return out;
}

VectorField Y_field(const ModeIndex& j, int m, const PhysParams& p, int /*n_trunc*/) {
  return {[j, m, p](const SpectralState& u) { return field_Y(j, m, u, p); }, true,
          "Y[(" + std::to_string(j.j1) + "," + std::to_string(j.j2) + ")," + std::to_string(m & 1) +
              "]"};
}

namespace {

// Closed form of Z without the headroom guard (used where clipping to the
// ambient truncation is the intended semantics, e.g. cascade probes).
SpectralState field_Z_impl(const ModeIndex& j, int m, const SpectralState& u,
                           const PhysParams& p) {
  m &= 1;
  const int nt = u.n_trunc();
  const double j2 = (double)j.norm2();
  const SpectralState sig = basis_state(Kind::Sigma, j, m, nt);
  const SpectralState psi = basis_state(Kind::Psi, j, (m + 1) & 1, nt);
  const SpectralState bus = advect_B(u, sig);  // B(U, sigma_j^m)

  SpectralState out = advect_B(drift_F(u, p), sig);

  SpectralState t = sig;
  t *= p.nu2 * p.nu2 * j2 * j2;
  out += t;

  t = psi;
  t *= sgn_pow(m) * (p.nu1 + p.nu2) * p.g * j.j1 * j2;
  out += t;

  out += dissipation_A(bus, p);

  t = advect_B(psi, u);
  t *= sgn_pow(m) * p.g * j.j1;
  out += t;

  t = bus;
  t *= p.nu2 * j2;
  out += t;

  t = advect_B(u, psi);
  t *= sgn_pow(m) * p.g * j.j1;
  out += t;

  out += advect_B(u, bus);
  out -= buoyancy_G(bus, p);
  return out;
}

}  // namespace

SpectralState field_Z(const ModeIndex& j, int m, const SpectralState& u, const PhysParams& p) {
  if (!u.trunc().contains(j)) throw TruncationOverflow("field_Z: mode outside truncation");
  require_headroom(2 * u.max_active_mode() + j.max_norm(), u.n_trunc(), "field_Z");
  return field_Z_impl(j, m, u, p);
}

VectorField Z_field(const ModeIndex& j, int m, const PhysParams& p, int /*n_trunc*/) {
  return {[j, m, p](const SpectralState& u) { return field_Z_impl(j, m, u, p); }, false,
          "Z[(" + std::to_string(j.j1) + "," + std::to_string(j.j2) + ")," + std::to_string(m & 1) +
              "]"};
}

namespace {

// Appends c * (sigma|psi)^parity_{l} with folding; drops the zero mode.
void push_folded(LinComb& lc, Kind kind, const ModeIndex& l, int parity, double c) {
  if (l.is_zero() || c == 0.0) return;
  parity &= 1;
  auto cm = canonicalize(l);
  if (cm.flipped && parity == 1) c = -c;
  lc.terms.push_back({BasisElement{kind, cm.index, parity}, c});
}

LinComb closed_B_pair(Kind out_kind, const ModeIndex& j, int m, const ModeIndex& k, int m2) {
  m &= 1;
  m2 &= 1;
  LinComb lc;
  const double pref = sgn_pow(m * m2) * 0.5 * (double)cross(j, k) / (double)j.norm2();
  push_folded(lc, out_kind, j + k, m + m2, pref);
  push_folded(lc, out_kind, j - k, m + m2, pref * sgn_pow(m2 + 1));
  return lc;
}

}  // namespace

LinComb closed_B_psi_sigma(const ModeIndex& j, int m, const ModeIndex& k, int m2) {
  return closed_B_pair(Kind::Sigma, j, m, k, m2);
}

LinComb closed_B_psi_psi(const ModeIndex& j, int m, const ModeIndex& k, int m2) {
  return closed_B_pair(Kind::Psi, j, m, k, m2);
}

LinComb bracket_Z_sigma(const ModeIndex& j, int m, const ModeIndex& k, int m2,
                        const PhysParams& p) {
  m &= 1;
  m2 &= 1;
  // [Z_j^m, sigma_k^m'] = g ((-1)^{m+1} j1 B(psi_j^{m+1}, sigma_k^{m'})
  //                          + (-1)^{m'} k1 B(psi_k^{m'+1}, sigma_j^m))
  LinComb lc;
  LinComb b1 = closed_B_psi_sigma(j, m + 1, k, m2);
  for (auto& [b, c] : b1.terms) lc.terms.push_back({b, c * p.g * sgn_pow(m + 1) * j.j1});
  LinComb b2 = closed_B_psi_sigma(k, m2 + 1, j, m);
  for (auto& [b, c] : b2.terms) lc.terms.push_back({b, c * p.g * sgn_pow(m2) * k.j1});

  // merge duplicate targets
  LinComb merged;
  for (const auto& [b, c] : lc.terms) {
    bool found = false;
    for (auto& [mb, mc] : merged.terms)
      if (mb.kind == b.kind && mb.index == b.index && mb.parity == b.parity) {
        mc += c;
        found = true;
        break;
      }
    if (!found) merged.terms.push_back({b, c});
  }
  std::erase_if(merged.terms, [](const auto& t) { return t.second == 0.0; });
  return merged;
}

Fraction coeff_a(const ModeIndex& j, const ModeIndex& k) {
  return make_fraction((long long)j.j1 * k.norm2() + (long long)k.j1 * j.norm2(),
                       (long long)j.norm2() * k.norm2());
}

Fraction coeff_b(const ModeIndex& j, const ModeIndex& k) {
  return make_fraction((long long)j.j1 * k.norm2() - (long long)k.j1 * j.norm2(),
                       (long long)j.norm2() * k.norm2());
}

std::vector<SigmaRecipe> generate_sigma(const ModeIndex& j, const ModeIndex& k) {
  // g cross a sigma^0_{j+k} =  [Z^1,s^0] + [Z^0,s^1]
  // g cross a sigma^1_{j+k} =  [Z^1,s^1] - [Z^0,s^0]
  // g cross b sigma^0_{j-k} =  [Z^0,s^1] - [Z^1,s^0]
  // g cross b sigma^1_{j-k} =  [Z^0,s^0] + [Z^1,s^1]
  const long long cr = cross(j, k);
  const Fraction a = coeff_a(j, k);
  const Fraction b = coeff_b(j, k);
  std::vector<SigmaRecipe> out;
  auto add = [&](const ModeIndex& raw, int parity, bool sum, const Fraction& ab, int ma, int mb,
                 int ca, int mc, int md, int cd) {
    if (raw.is_zero()) return;
    auto cm = canonicalize(raw);
    SigmaRecipe r;
    r.target = cm.index;
    r.parity = parity;
    r.j = j;
    r.k = k;
    r.sum = sum;
    r.sign_fold = (cm.flipped && parity == 1) ? -1 : 1;
    r.ma = ma;
    r.mb = mb;
    r.ca = ca;
    r.mc = mc;
    r.md = md;
    r.cd = cd;
    r.ab = ab;
    r.cross = cr;
    out.push_back(r);
  };
  add(j + k, 0, true, a, 1, 0, 1, 0, 1, 1);
  add(j + k, 1, true, a, 1, 1, 1, 0, 0, -1);
  add(j - k, 0, false, b, 0, 1, 1, 1, 0, -1);
  add(j - k, 1, false, b, 0, 0, 1, 1, 1, 1);
  return out;
}

SpectralState bracket_Z_Y(const ModeIndex& j, int m, const ModeIndex& k, int m2,
                          const SpectralState& u, const PhysParams& p) {
  m &= 1;
  m2 &= 1;
  const int nt = u.n_trunc();
  const int du = u.max_active_mode();
  require_headroom(std::max(2 * du + j.max_norm(), du + j.max_norm() + k.max_norm()), nt,
                   "bracket_Z_Y");

  const SpectralState sig_j = basis_state(Kind::Sigma, j, m, nt);
  const SpectralState sig_k = basis_state(Kind::Sigma, k, m2, nt);
  const SpectralState y_j = field_Y(j, m, u, p);
  const SpectralState y_k = field_Y(k, m2, u, p);

  SpectralState out = advect_B(field_Z_impl(j, m, u, p), sig_k);
  out -= advect_B(grad_F(u, y_k, p), sig_j);
  out -= advect_B(y_k, y_j);
  out -= advect_B(y_j, y_k);
  SpectralState byk = advect_B(y_k, sig_j);
  out += grad_F(u, byk, p);
  return out;
}

SpectralState zy_explicit_part(const ModeIndex& j, int m, const ModeIndex& k, int m2,
                               int n_trunc, const PhysParams& p) {
  m &= 1;
  m2 &= 1;
  const SpectralState psi_j = basis_state(Kind::Psi, j, (m + 1) & 1, n_trunc);
  const SpectralState psi_k = basis_state(Kind::Psi, k, (m2 + 1) & 1, n_trunc);
  SpectralState t1 = advect_B(psi_j, psi_k);
  t1 += advect_B(psi_k, psi_j);
  t1 *= sgn_pow(m + m2 + 1) * p.g * p.g * j.j1 * k.j1;

  SpectralState t2 =
      buoyancy_G(advect_B(psi_k, basis_state(Kind::Sigma, j, m, n_trunc)), p);
  t2 *= sgn_pow(m2) * p.g * k.j1;
  t1 += t2;
  return t1;
}

SpectralState zy_remainder_H(const ModeIndex& j, int m, const ModeIndex& k, int m2,
                             const SpectralState& u, const PhysParams& p) {
  SpectralState h = bracket_Z_Y(j, m, k, m2, u, p);
  h -= zy_explicit_part(j, m, k, m2, u.n_trunc(), p);
  return h;
}

PsiWithError psi_with_error(const ModeIndex& j, int m, const SpectralState& u,
                            const PhysParams& p) {
  m &= 1;
  const int nt = u.n_trunc();
  if (!u.trunc().contains(j))
    throw TruncationOverflow("psi_with_error: mode outside truncation");
  PsiWithError out{SpectralState(nt), SpectralState(nt)};
  if (j.j1 != 0) {
    require_headroom(u.max_active_mode() + j.max_norm(), nt, "psi_with_error");
    out.combo = field_Y(j, (m + 1) & 1, u, p);
    out.combo *= sgn_pow(m + 1) / (p.g * j.j1);
  } else {
    const ModeIndex lp{1, j.j2};  // l' = j + e1
    const ModeIndex e1{1, 0};
    const double l2 = (double)j.j2;
    const double scale = (double)lp.norm2() / (p.g * p.g * l2 * l2 * l2);
    if (m == 0) {
      out.combo = bracket_Z_Y(lp, 0, e1, 0, u, p);
      out.combo += bracket_Z_Y(lp, 1, e1, 1, u, p);
    } else {
      out.combo = bracket_Z_Y(lp, 1, e1, 0, u, p);
      out.combo -= bracket_Z_Y(lp, 0, e1, 1, u, p);
    }
    out.combo *= scale;
  }
  out.junk = out.combo - basis_state(Kind::Psi, j, m, nt);
  return out;
}

JunkTail junk_tail(const ModeIndex& j, int m, const SpectralState& u, const PhysParams& p,
                   int n_tilde) {
  if (n_tilde > u.n_trunc())
    throw std::invalid_argument("junk_tail: N_tilde exceeds truncation");
  JunkTail out{project(psi_with_error(j, m, u, p).junk, n_tilde, Band::High), 0.0, 0.0};
  out.weighted = weighted_norm(out.tail, p);
  out.coefficient = norm(out.tail);
  return out;
}

std::vector<ModeIndex> set_I_N(int n) {
  std::vector<ModeIndex> out;
  for (int j1 = 0; j1 <= n + 1; ++j1)
    for (int j2 = -(n + 1); j2 <= n + 1; ++j2) {
      const ModeIndex j{j1, j2};
      if (!j.canonical()) continue;
      if (std::abs(j1) + std::abs(j2) > n + 1) continue;
      if ((j1 == 0 && (j2 == n || j2 == n + 1)) || (j2 == 0 && (j1 == n || j1 == n + 1)))
        continue;
      out.push_back(j);
    }
  return out;
}

SpanLedger generate_span(const std::vector<ModeIndex>& forced, int n, int depth_cap,
                         int lattice_cap) {
  if (lattice_cap < 0) lattice_cap = n + 1;
  SpanLedger ledger;
  ledger.forced = forced;

  auto key = [](const ModeIndex& j) { return std::pair<int, int>{j.j1, j.j2}; };
  std::set<std::pair<int, int>> seen;
  for (const auto& f : forced) {
    if (!f.canonical()) throw std::invalid_argument("generate_span: forced modes must be canonical");
    if (seen.insert(key(f)).second) {
      ledger.sigma_modes.push_back(f);
      ledger.sigma_depth.push_back(0);
    }
  }

  size_t frontier_begin = 0;
  for (int depth = 1; depth <= depth_cap; ++depth) {
    const size_t n_before = ledger.sigma_modes.size();
    std::vector<ModeIndex> fresh;
    std::vector<SigmaRecipe> fresh_recipes;
    // pairs with at least one element touched since the previous round
    for (size_t a = 0; a < n_before; ++a)
      for (size_t b = std::max(a + 1, frontier_begin); b < n_before; ++b)
        for (int swap = 0; swap < 2; ++swap) {
          const ModeIndex& j = swap ? ledger.sigma_modes[b] : ledger.sigma_modes[a];
          const ModeIndex& k = swap ? ledger.sigma_modes[a] : ledger.sigma_modes[b];
          for (const auto& r : generate_sigma(j, k)) {
            if (!r.reachable()) continue;
            if (std::abs(r.target.j1) + std::abs(r.target.j2) > lattice_cap) continue;
            if (seen.count(key(r.target))) continue;
            bool pending = false;
            for (const auto& f : fresh)
              if (f == r.target) pending = true;
            if (pending) continue;
            fresh.push_back(r.target);
            fresh_recipes.push_back(r);
          }
        }
    if (fresh.empty()) break;
    frontier_begin = n_before;
    for (size_t i = 0; i < fresh.size(); ++i) {
      seen.insert(key(fresh[i]));
      ledger.sigma_modes.push_back(fresh[i]);
      ledger.sigma_depth.push_back(depth);
      ledger.recipes.push_back(fresh_recipes[i]);
    }
    ledger.depth_reached = depth;
  }

  // psi coverage from the generated sigma set
  auto has_sigma = [&](const ModeIndex& j) { return seen.count(key(j)) > 0; };
  for (const auto& t : ledger.sigma_modes) {
    if (t.j1 != 0) {
      ledger.psi_modes.push_back({t, "direct"});
    } else if (has_sigma({1, t.j2}) && has_sigma({1, 0})) {
      ledger.psi_modes.push_back({t, "axis"});
    }
  }

  // coverage of I_N
  for (const auto& t : set_I_N(n)) {
    if (!has_sigma(t)) ledger.uncovered_sigma.push_back(t);
    bool psi_ok = t.j1 != 0 ? has_sigma(t) : (has_sigma({1, t.j2}) && has_sigma({1, 0}));
    if (!psi_ok) ledger.uncovered_psi.push_back(t);
  }
  ledger.covered = ledger.uncovered_sigma.empty() && ledger.uncovered_psi.empty();
  return ledger;
}

double quad_form_Q(int n, int n_tilde, const SpectralState& u, const SpectralState& phi,
                   const PhysParams& p) {
  if (!(n < n_tilde)) throw std::invalid_argument("quad_form_Q: requires N < N_tilde");
  if (u.n_trunc() != phi.n_trunc())
    throw std::invalid_argument("quad_form_Q: truncation mismatch");
  const auto& tr = u.trunc();
  double q = 0.0;
  for (int i = 0; i < tr.size(); ++i) {
    const ModeIndex& j = tr.mode(i);
    if (j.norm2() > (long long)n * n) continue;
    for (int m = 0; m < 2; ++m) {
      const double s = phi.at(i, m == 0 ? kThetaCos : kThetaSin);
      q += s * s;
      JunkTail jt = junk_tail(j, m, u, p, n_tilde);
      const double w = phi.at(i, m == 0 ? kOmegaCos : kOmegaSin) + inner(phi, jt.tail);
      q += w * w;
    }
  }
  return q;
}

std::string ChainElement::label() const {
  auto mode_str = [](const ModeIndex& j) {
    return "(" + std::to_string(j.j1) + "," + std::to_string(j.j2) + ")";
  };
  switch (type) {
    case Type::Sigma:
      return "sigma" + mode_str(j) + "^" + std::to_string(m);
    case Type::Y:
      return "Y" + mode_str(j) + "^" + std::to_string(m);
    case Type::Z:
      return "Z" + mode_str(j) + "^" + std::to_string(m);
    case Type::ZSigma:
      return "[Z" + mode_str(j) + "^" + std::to_string(m) + ",sigma" + mode_str(k) + "^" +
             std::to_string(m2) + "]";
    case Type::ZY:
      return "[Z" + mode_str(j) + "^" + std::to_string(m) + ",Y" + mode_str(k) + "^" +
             std::to_string(m2) + "]";
  }
  return "?";
}

namespace {

VectorField chain_field(const ChainElement& e, const PhysParams& p, int n_trunc) {
  switch (e.type) {
    case ChainElement::Type::Sigma:
      return const_field(basis_state(Kind::Sigma, e.j, e.m, n_trunc), e.label());
    case ChainElement::Type::Y:
      return Y_field(e.j, e.m, p, n_trunc);
    case ChainElement::Type::Z:
      return Z_field(e.j, e.m, p, n_trunc);
    case ChainElement::Type::ZSigma:
      return const_field(bracket_Z_sigma(e.j, e.m, e.k, e.m2, p).materialize(n_trunc),
                         e.label());
    case ChainElement::Type::ZY: {
      auto j = e.j;
      auto k = e.k;
      int m = e.m, m2 = e.m2;
      return {[j, m, k, m2, p](const SpectralState& u) {
                // clipped evaluation consistent with the ambient truncation
                const int nt = u.n_trunc();
                const SpectralState sig_j = basis_state(Kind::Sigma, j, m & 1, nt);
                const SpectralState sig_k = basis_state(Kind::Sigma, k, m2 & 1, nt);
                const SpectralState y_j = field_Y(j, m, u, p);
                const SpectralState y_k = field_Y(k, m2, u, p);
                SpectralState out = advect_B(field_Z_impl(j, m, u, p), sig_k);
                out -= advect_B(grad_F(u, y_k, p), sig_j);
                out -= advect_B(y_k, y_j);
                out -= advect_B(y_j, y_k);
                out += grad_F(u, advect_B(y_k, sig_j), p);
                return out;
              },
              true, e.label()};
    }
  }
  throw std::logic_error("chain_field: unknown element");
}

}  // namespace

CascadeReport cascade_probe(const Trajectory& traj, const NoisePath& path,
                            const SpectralState& phi, const std::vector<ChainElement>& chain,
                            int work_n_trunc) {
  const int nt = traj.n_trunc();
  if (work_n_trunc < nt) work_n_trunc = nt;
  const int n = traj.n_steps();
  const int i_half = n / 2;
  const PhysParams& p = traj.params;

  // K_{t,T} phi on [T/2, T] and the shifted variable Ubar = U - sigma W
  auto ks = adjoint_sweep(traj, i_half, n, phi);
  std::vector<SpectralState> ubar((size_t)(n - i_half + 1), SpectralState(work_n_trunc));
  {
    std::vector<double> w((size_t)path.d, 0.0);
    for (int i = 0; i < n; ++i) {
      if (i >= i_half) {
        SpectralState ub = traj.state(i) - noise_inject(w, p, nt);
        ubar[(size_t)(i - i_half)] = ub.embedded(work_n_trunc);
      }
      const double* inc = path.step_increments(i);
      for (int k = 0; k < path.d; ++k) w[(size_t)k] += inc[k];
    }
    SpectralState ub = traj.state(n) - noise_inject(w, p, nt);
    ubar.back() = ub.embedded(work_n_trunc);
  }

  CascadeReport rep;
  for (int i = i_half; i <= n; ++i) rep.times.push_back(traj.time(i));

  std::vector<SpectralState> kw(ks.size(), SpectralState(work_n_trunc));
  for (size_t i = 0; i < ks.size(); ++i) kw[i] = ks[i].embedded(work_n_trunc);

  for (const auto& e : chain) {
    VectorField field = chain_field(e, p, work_n_trunc);
    CascadeSeries series;
    series.element = e;
    const size_t m = ubar.size();
    std::vector<double> g(m), pred(m);
    for (size_t i = 0; i < m; ++i) {
      SpectralState eu = field(ubar[i]);
      g[i] = weighted_inner(kw[i], eu, p);
      // d/dt g = <K phi, [F(U), E(Ubar)]> with the generalized bracket; the
      // motion and the adjoint generator act on the trajectory truncation
      SpectralState f_motion = drift_F(traj.state(i_half + (int)i), p).embedded(work_n_trunc);
      SpectralState br = directional_fd(field, ubar[i], f_motion, 0.5);
      br -= grad_F(traj.state(i_half + (int)i), eu.restricted(nt), p).embedded(work_n_trunc);
      pred[i] = weighted_inner(kw[i], br, p);
    }
    series.g = g;
    for (size_t i = 0; i < m; ++i) {
      series.sup_g = std::max(series.sup_g, std::abs(g[i]));
      series.sup_dg = std::max(series.sup_dg, std::abs(pred[i]));
    }
    for (size_t i = 1; i + 1 < m; ++i) {
      const double fd = (g[i + 1] - g[i - 1]) / (2.0 * traj.dt);
      series.max_fd_residual = std::max(series.max_fd_residual, std::abs(fd - pred[i]));
    }
    rep.series.push_back(std::move(series));
  }
  return rep;
}

}  // namespace bsq
