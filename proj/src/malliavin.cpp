#include "bsq/malliavin.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>

#include "bsq/parallel.hpp"

namespace bsq {

namespace {
constexpr double kTwoPiSq = 2.0 * M_PI * M_PI;

Eigen::Map<const Eigen::MatrixXd> as_eigen(const GramMatrix& m) {
  return {m.entries.data(), m.dim(), m.dim()};
}
}  // namespace

GramBasis::GramBasis(int n_trunc, const PhysParams& p) : n_(n_trunc) {
  const auto& tr = truncation(n_trunc);
  scale_.resize((size_t)4 * tr.size());
  const double w_omega = std::sqrt(kTwoPiSq * p.omega_weight());
  const double w_theta = std::sqrt(kTwoPiSq);
  for (int i = 0; i < tr.size(); ++i) {
    scale_[(size_t)4 * i + kOmegaCos] = w_omega;
    scale_[(size_t)4 * i + kOmegaSin] = w_omega;
    scale_[(size_t)4 * i + kThetaCos] = w_theta;
    scale_[(size_t)4 * i + kThetaSin] = w_theta;
  }
}

std::vector<double> GramBasis::to_vector(const SpectralState& u) const {
  if (u.n_trunc() != n_) throw std::invalid_argument("GramBasis: truncation mismatch");
  std::vector<double> v(scale_.size());
  for (size_t i = 0; i < v.size(); ++i) v[i] = u.data()[i] * scale_[i];
  return v;
}

SpectralState GramBasis::to_state(const std::vector<double>& v) const {
  if (v.size() != scale_.size()) throw std::invalid_argument("GramBasis: dimension mismatch");
  SpectralState u(n_);
  for (size_t i = 0; i < v.size(); ++i) u.data()[i] = v[i] / scale_[i];
  return u;
}

const std::vector<int>& GramBasis::low_coords(int N) const {
  auto it = low_cache_.find(N);
  if (it != low_cache_.end()) return it->second;
  const auto& tr = truncation(n_);
  std::vector<int> low;
  for (int i = 0; i < tr.size(); ++i)
    if (tr.mode(i).norm2() <= (long long)N * N)
      for (int s = 0; s < 4; ++s) low.push_back(4 * i + s);
  return low_cache_.emplace(N, std::move(low)).first->second;
}

std::vector<std::vector<double>> apply_Astar(const Trajectory& traj, int is, int it,
                                             const SpectralState& phi) {
  auto sweep = adjoint_sweep(traj, is, it, phi);
  std::vector<std::vector<double>> out(sweep.size());
  for (size_t r = 0; r < sweep.size(); ++r) out[r] = noise_project(sweep[r], traj.params);
  return out;
}

SpectralState apply_Aop(const Trajectory& traj, int is, int it,
                        const std::vector<std::vector<double>>& v) {
  if ((int)v.size() != it - is + 1)
    throw std::invalid_argument("apply_Aop: control not sampled on the [s,t] grid");
  const int nt = traj.n_trunc();
  const double dt = traj.dt;
  // trapezoid: acc = sum_{r<=i} w_r J_{r,i} sigma v_r, advanced one step at a time
  SpectralState acc = noise_inject(v.front(), traj.params, nt);
  acc *= (it > is ? 0.5 * dt : 0.0);
  for (int i = is + 1; i <= it; ++i) {
    acc = tangent_step(acc, traj.state(i - 1), traj.params, dt, traj.opts);
    SpectralState inj = noise_inject(v[(size_t)(i - is)], traj.params, nt);
    inj *= (i == it ? 0.5 * dt : dt);
    acc += inj;
  }
  return acc;
}

GramMatrix assemble_M(const Trajectory& traj, int is, int it) {
  const GramBasis basis(traj.n_trunc(), traj.params);
  const int dim = basis.dim();
  const int nr = it - is + 1;
  const int d = traj.params.noise_dim();
  const double dt = traj.dt;

  // rows[i] = flattened A* e_i: the d pairings at each grid node
  std::vector<std::vector<double>> rows((size_t)dim);
  std::vector<double> e((size_t)dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    e[(size_t)i] = 1.0;
    SpectralState ei = basis.to_state(e);
    e[(size_t)i] = 0.0;
    auto vals = apply_Astar(traj, is, it, ei);
    auto& row = rows[(size_t)i];
    row.resize((size_t)nr * d);
    for (int r = 0; r < nr; ++r) {
      const double w = std::sqrt((r == 0 || r == nr - 1) ? 0.5 * dt : dt);
      for (int k = 0; k < d; ++k) row[(size_t)r * d + k] = w * vals[(size_t)r][(size_t)k];
    }
  }

  GramMatrix m;
  m.n_trunc = traj.n_trunc();
  m.s = traj.time(is);
  m.t = traj.time(it);
  m.quadrature_steps = it - is;
  m.entries.assign((size_t)dim * dim, 0.0);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const double val =
          std::inner_product(rows[(size_t)i].begin(), rows[(size_t)i].end(),
                             rows[(size_t)j].begin(), 0.0);
      m.at(i, j) = val;
      m.at(j, i) = val;
    }
  return m;
}

ConeMinResult cone_min(const GramMatrix& gm, const ConeSpec& cone, double constraint_tol) {
  const int dim = gm.dim();
  if (dim == 0) throw std::invalid_argument("cone_min: empty matrix");
  if (!(cone.alpha > 0.0 && cone.alpha <= 1.0))
    throw std::invalid_argument("cone_min: alpha must lie in (0,1]");
  Eigen::MatrixXd m = as_eigen(gm);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asym > 1e-12 * scale) throw std::invalid_argument("cone_min: matrix is not symmetric");
  m = 0.5 * (m + m.transpose().eval());

  const GramBasis basis(gm.n_trunc, PhysParams{});
  const auto& low = basis.low_coords(cone.N);
  if (low.empty()) throw std::invalid_argument("cone_min: P_N has empty range");

  ConeMinResult res;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  res.min_eigenvalue = es.eigenvalues()(0);

  if (cone.alpha == 1.0) {
    // cone degenerates to the range of P_N: minimize the low-block form
    Eigen::MatrixXd mll((int)low.size(), (int)low.size());
    for (size_t a = 0; a < low.size(); ++a)
      for (size_t b = 0; b < low.size(); ++b) mll((int)a, (int)b) = m(low[a], low[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esl(mll);
    res.value = esl.eigenvalues()(0);
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(dim);
    for (size_t a = 0; a < low.size(); ++a) phi(low[a]) = esl.eigenvectors().col(0)((int)a);
    res.argmin.assign(phi.data(), phi.data() + dim);
    res.boundary = true;
    return res;
  }

  {
    Eigen::VectorXd phi = es.eigenvectors().col(0);
    double lm = 0.0;
    for (int c : low) lm += phi(c) * phi(c);
    if (lm >= cone.alpha - constraint_tol) {
      res.value = res.min_eigenvalue;
      res.argmin.assign(phi.data(), phi.data() + dim);
      return res;
    }
  }

  // Boundary branch. For any lambda >= 0 and any phi in the cone,
  //   <M phi, phi> = <(M - lambda P_N) phi, phi> + lambda ||P_N phi||^2
  //                >= mu_min(lambda) + lambda alpha =: L(lambda),
  // so L is a certified lower bound; bisection on the low-mode mass of the
  // bottom eigenvector locates the multiplier, and feasible candidates
  // (pure eigenvectors inside the cone, or boundary mixtures within the
  // near-degenerate bottom eigenspace at crossings) close the duality gap.
  res.boundary = true;
  auto pmass = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (int c : low) s += a(c) * b(c);
    return s;
  };

  double best_value = 1e300;
  Eigen::VectorXd best_phi = Eigen::VectorXd::Zero(dim);
  double lower_bound = res.min_eigenvalue;  // L(0)

  auto consider = [&](double lambda) {
    Eigen::MatrixXd shifted = m;
    for (int c : low) shifted(c, c) -= lambda;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(shifted);
    const double mu_min = es2.eigenvalues()(0);
    lower_bound = std::max(lower_bound, mu_min + lambda * cone.alpha);

    const Eigen::VectorXd v0 = es2.eigenvectors().col(0);
    const double lm0 = pmass(v0, v0);
    if (lm0 >= cone.alpha - constraint_tol) {
      const double q = v0.dot(m.selfadjointView<Eigen::Lower>() * v0);
      if (q < best_value) {
        best_value = q;
        best_phi = v0;
      }
    }

    // boundary mixture within the (near-)degenerate bottom eigenspace
    for (double tol_deg : {1e-9, 1e-6, 1e-3}) {
      int k = 1;
      while (k < dim && es2.eigenvalues()(k) <= mu_min + tol_deg * std::max(1.0, scale)) ++k;
      if (k < 2) continue;
      k = std::min(k, 8);
      Eigen::MatrixXd V = es2.eigenvectors().leftCols(k);
      Eigen::MatrixXd Pi(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) Pi(a, b) = pmass(V.col(a), V.col(b));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esp(Pi);
      const double pi_lo = esp.eigenvalues()(0), pi_hi = esp.eigenvalues()(k - 1);
      if (pi_lo > cone.alpha || pi_hi < cone.alpha) continue;
      const double t = (cone.alpha - pi_lo) / std::max(pi_hi - pi_lo, 1e-300);
      Eigen::VectorXd c = std::sqrt(1.0 - t) * esp.eigenvectors().col(0) +
                          std::sqrt(t) * esp.eigenvectors().col(k - 1);
      Eigen::VectorXd w = V * c;
      w.normalize();
      if (pmass(w, w) < cone.alpha - constraint_tol) continue;
      const double q = w.dot(m.selfadjointView<Eigen::Lower>() * w);
      if (q < best_value) {
        best_value = q;
        best_phi = w;
      }
      break;
    }
    return lm0;
  };

  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * scale);
  while (consider(hi) < cone.alpha && hi < 1e18) hi *= 2.0;
  for (int iter = 0; iter < 80; ++iter) {
    const double gap_tol = 1e-11 * std::max(1.0, scale) + 1e-9 * std::abs(best_value);
    if (best_value - lower_bound <= gap_tol) break;
    const double mid = 0.5 * (lo + hi);
    const double lm = consider(mid);
    if (lm >= cone.alpha)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
  }
  res.value = best_value;
  res.argmin.assign(best_phi.data(), best_phi.data() + dim);
  return res;
}

ControlStage regularized_control(const Trajectory& traj, int n_index, int steps_per_unit,
                                 double beta, const SpectralState& rho_n) {
  if (!(beta > 0.0)) throw std::invalid_argument("regularized_control: beta must be positive");
  const int i0 = n_index;
  const int i1 = n_index + steps_per_unit;
  const int i2 = n_index + 2 * steps_per_unit;
  if (i2 > traj.n_steps())
    throw std::invalid_argument("regularized_control: horizon does not cover [n, n+2]");

  const GramBasis basis(traj.n_trunc(), traj.params);
  GramMatrix m = assemble_M(traj, i0, i1);
  Eigen::MatrixXd reg = as_eigen(m);
  reg.diagonal().array() += beta;

  SpectralState jrho = tangent_J(traj, i0, i1, rho_n);
  std::vector<double> jv = basis.to_vector(jrho);
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(jv.data(), (Eigen::Index)jv.size());
  Eigen::VectorXd sol = Eigen::LDLT<Eigen::MatrixXd>(reg).solve(rhs);

  ControlStage stage;
  std::vector<double> solv(sol.data(), sol.data() + sol.size());
  SpectralState y = basis.to_state(solv);
  stage.v = apply_Astar(traj, i0, i1, y);

  // residual = beta (M+beta)^-1 J rho_n, transported to n+2 by J
  SpectralState res_state = basis.to_state(solv);
  res_state *= beta;
  stage.residual = res_state;
  stage.rho_next = tangent_J(traj, i1, i2, res_state);
  return stage;
}

ControlDecayReport control_decay_experiment(const PhysParams& p, int n_trunc, double dt,
                                            double beta, int n_stages, int samples,
                                            uint64_t seed, int workers) {
  if (n_stages % 2 != 0) throw std::invalid_argument("control_decay: stage count must be even");
  const int steps_per_unit = (int)std::llround(1.0 / dt);
  const int n_pairs = n_stages / 2;
  const int total_steps = n_stages * steps_per_unit;

  // per-realization sequence of ||rho_n|| at n = 0, 2, ..., n_stages
  std::vector<std::vector<double>> norms((size_t)samples);
  parallel_for(samples, workers, [&](int r) {
    NoisePath path = make_noise_path(realization_seed(seed, (uint64_t)r), dt, total_steps,
                                     p.noise_dim());
    SpectralState u0(n_trunc);
    Trajectory traj = evolve(u0, p, n_stages * 1.0, path);
    Gaussian gen(realization_seed(seed ^ 0xabcdef12345ull, (uint64_t)r));
    SpectralState rho(n_trunc);
    for (double& x : rho.data()) x = gen();
    rho *= 1.0 / weighted_norm(rho, p);
    auto& seq = norms[(size_t)r];
    seq.push_back(weighted_norm(rho, p));
    for (int s = 0; s < n_pairs; ++s) {
      auto stage = regularized_control(traj, 2 * s * steps_per_unit, steps_per_unit, beta, rho);
      rho = stage.rho_next;
      seq.push_back(weighted_norm(rho, p));
    }
  });

  ControlDecayReport rep;
  rep.samples = samples;
  const int n_points = n_pairs + 1;
  rep.stage_moment.assign((size_t)n_points, 0.0);
  for (const auto& seq : norms)
    for (int i = 0; i < n_points; ++i) rep.stage_moment[(size_t)i] += std::pow(seq[(size_t)i], 8);
  for (double& x : rep.stage_moment) x /= samples;

  auto overall_factor = [&](const std::vector<int>& idx) {
    double first = 0.0, last = 0.0;
    for (int r : idx) {
      first += std::pow(norms[(size_t)r].front(), 8);
      last += std::pow(norms[(size_t)r].back(), 8);
    }
    return std::pow(last / first, 1.0 / n_pairs);
  };

  std::vector<int> all(samples);
  std::iota(all.begin(), all.end(), 0);
  rep.contraction = overall_factor(all);

  // bootstrap CI over realizations
  const int n_boot = 2000;
  std::vector<double> boot((size_t)n_boot);
  uint64_t state = splitmix64(seed ^ 0x42u);
  auto next_idx = [&]() {
    state = splitmix64(state);
    return (int)(state % (uint64_t)samples);
  };
  std::vector<int> idx((size_t)samples);
  for (int b = 0; b < n_boot; ++b) {
    for (int i = 0; i < samples; ++i) idx[(size_t)i] = next_idx();
    boot[(size_t)b] = overall_factor(idx);
  }
  std::sort(boot.begin(), boot.end());
  rep.ci_low = boot[(size_t)(0.025 * n_boot)];
  rep.ci_high = boot[(size_t)(0.975 * n_boot) - 1];
  return rep;
}

ItoIsometryReport ito_isometry_check(const AdaptedControl& gen, double expected, int d, double dt,
                                     int n_steps, int samples, uint64_t seed) {
  std::vector<double> integrals((size_t)samples);
  for (int r = 0; r < samples; ++r) {
    Gaussian g(realization_seed(seed, (uint64_t)r));
    const double sd = std::sqrt(dt);
    std::vector<double> w((size_t)d, 0.0);
    double acc = 0.0;
    for (int i = 0; i < n_steps; ++i) {
      const std::vector<double> v = gen(w, i);
      for (int k = 0; k < d; ++k) {
        const double dw = sd * g();
        acc += v[(size_t)k] * dw;
        w[(size_t)k] += dw;
      }
    }
    integrals[(size_t)r] = acc;
  }
  double mean = 0.0;
  for (double x : integrals) mean += x;
  mean /= samples;
  double m2 = 0.0, m4 = 0.0;
  for (double x : integrals) {
    const double c = x - mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  m2 /= samples;
  m4 /= samples;

  ItoIsometryReport rep;
  rep.samples = samples;
  rep.expected = expected;
  rep.sample_variance = m2 * samples / (samples - 1.0);
  // SE of the variance estimator from the empirical fourth moment
  rep.standard_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / samples);
  return rep;
}

}  // namespace bsq
