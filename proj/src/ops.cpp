#include "bsq/ops.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "bsq/fft.hpp"

namespace bsq {

namespace {
constexpr double kTwoPiSq = 2.0 * M_PI * M_PI;  // integral of cos^2(j.x) over [-pi,pi]^2

// d_x / d_y of (c cos + s sin)(j.x): new_c = jc*s, new_s = -jc*c.
inline void deriv_coeffs(const ModeIndex& j, double c, double s, int axis, double& dc,
                         double& ds) {
  const int jc = axis == 0 ? j.j1 : j.j2;
  dc = jc * s;
  ds = -jc * c;
}
}  // namespace

const Truncation& truncation(int n_trunc) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Truncation>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n_trunc];
  if (!slot) slot = std::make_unique<Truncation>(n_trunc);
  return *slot;
}

SpectralState basis_vector(const BasisElement& b, int n_trunc) {
  SpectralState u(n_trunc);
  if (!u.trunc().contains(b.index))
    throw std::out_of_range("basis_vector: index outside truncation");
  u.coeff(b.index, b.slot()) = 1.0;
  return u;
}

double weighted_inner(const SpectralState& u, const SpectralState& v, const PhysParams& p) {
  if (u.n_trunc() != v.n_trunc())
    throw std::invalid_argument("weighted_inner: truncation mismatch");
  const double zeta = p.omega_weight();
  double sw = 0.0, st = 0.0;
  const auto& a = u.data();
  const auto& b = v.data();
  for (size_t i = 0; i < a.size(); i += 4) {
    sw += a[i + kOmegaCos] * b[i + kOmegaCos] + a[i + kOmegaSin] * b[i + kOmegaSin];
    st += a[i + kThetaCos] * b[i + kThetaCos] + a[i + kThetaSin] * b[i + kThetaSin];
  }
  return kTwoPiSq * (zeta * sw + st);
}

double weighted_norm(const SpectralState& u, const PhysParams& p) {
  return std::sqrt(weighted_inner(u, u, p));
}

double sobolev_norm(const SpectralState& u, const PhysParams& p, double s) {
  const double zeta = p.omega_weight();
  const auto& tr = u.trunc();
  double sw = 0.0, st = 0.0;
  for (int i = 0; i < tr.size(); ++i) {
    const double mult = std::pow((double)tr.mode(i).norm2(), s);
    sw += mult * (u.at(i, kOmegaCos) * u.at(i, kOmegaCos) +
                  u.at(i, kOmegaSin) * u.at(i, kOmegaSin));
    st += mult * (u.at(i, kThetaCos) * u.at(i, kThetaCos) +
                  u.at(i, kThetaSin) * u.at(i, kThetaSin));
  }
  return std::sqrt(kTwoPiSq * (zeta * sw + st));
}

Velocity biot_savart(const SpectralState& u) {
  // K * cos(j.x) = (jperp/|j|^2) sin(j.x), K * sin(j.x) = -(jperp/|j|^2) cos(j.x)
  // with jperp = (-j2, j1), so that curl u = omega and div u = 0 exactly.
  Velocity vel(u.n_trunc());
  const auto& tr = u.trunc();
  for (int i = 0; i < tr.size(); ++i) {
    const ModeIndex& j = tr.mode(i);
    const double inv = 1.0 / j.norm2();
    const double p1 = -j.j2 * inv, p2 = j.j1 * inv;
    const double c = u.at(i, kOmegaCos), s = u.at(i, kOmegaSin);
    vel.a[(size_t)4 * i + 0] = -p1 * s;  // u1 cos
    vel.a[(size_t)4 * i + 1] = p1 * c;   // u1 sin
    vel.a[(size_t)4 * i + 2] = -p2 * s;  // u2 cos
    vel.a[(size_t)4 * i + 3] = p2 * c;   // u2 sin
  }
  return vel;
}

SpectralState curl_of(const Velocity& vel) {
  SpectralState out(vel.n_trunc);
  const auto& tr = out.trunc();
  for (int i = 0; i < tr.size(); ++i) {
    const ModeIndex& j = tr.mode(i);
    double d2c, d2s, d1c, d1s;
    deriv_coeffs(j, vel.a[4 * i + 2], vel.a[4 * i + 3], 0, d2c, d2s);  // d_x u2
    deriv_coeffs(j, vel.a[4 * i + 0], vel.a[4 * i + 1], 1, d1c, d1s);  // d_y u1
    out.at(i, kOmegaCos) = d2c - d1c;
    out.at(i, kOmegaSin) = d2s - d1s;
  }
  return out;
}

SpectralState divergence_of(const Velocity& vel) {
  SpectralState out(vel.n_trunc);
  const auto& tr = out.trunc();
  for (int i = 0; i < tr.size(); ++i) {
    const ModeIndex& j = tr.mode(i);
    double d1c, d1s, d2c, d2s;
    deriv_coeffs(j, vel.a[4 * i + 0], vel.a[4 * i + 1], 0, d1c, d1s);  // d_x u1
    deriv_coeffs(j, vel.a[4 * i + 2], vel.a[4 * i + 3], 1, d2c, d2s);  // d_y u2
    out.at(i, kOmegaCos) = d1c + d2c;
    out.at(i, kOmegaSin) = d1s + d2s;
  }
  return out;
}

namespace {

// Shared advection kernel: computes (vel . grad) applied to both components
// of v on the padded grid and re-truncates.
SpectralState advect_by(const Velocity& vel, const SpectralState& v) {
  const int N = v.n_trunc();
  const auto& tr = v.trunc();
  auto& ws = fft::workspace(fft::pad_size(N));

  const int nm = tr.size();
  std::vector<double> dx(4 * (size_t)nm), dy(4 * (size_t)nm);
  for (int i = 0; i < nm; ++i) {
    const ModeIndex& j = tr.mode(i);
    for (int comp = 0; comp < 2; ++comp) {
      const Slot cs = comp == 0 ? kOmegaCos : kThetaCos;
      const Slot ss = comp == 0 ? kOmegaSin : kThetaSin;
      deriv_coeffs(j, v.at(i, cs), v.at(i, ss), 0, dx[4 * (size_t)i + 2 * comp],
                   dx[4 * (size_t)i + 2 * comp + 1]);
      deriv_coeffs(j, v.at(i, cs), v.at(i, ss), 1, dy[4 * (size_t)i + 2 * comp],
                   dy[4 * (size_t)i + 2 * comp + 1]);
    }
  }

  std::vector<double> gu1, gu2, gx, gy, prod((size_t)ws.size() * ws.size());
  ws.synth(tr, vel.a.data(), 4, 0, 1, gu1);
  ws.synth(tr, vel.a.data(), 4, 2, 3, gu2);

  SpectralState out(N);
  for (int comp = 0; comp < 2; ++comp) {
    ws.synth(tr, dx.data(), 4, 2 * comp, 2 * comp + 1, gx);
    ws.synth(tr, dy.data(), 4, 2 * comp, 2 * comp + 1, gy);
    for (size_t k = 0; k < prod.size(); ++k) prod[k] = gu1[k] * gx[k] + gu2[k] * gy[k];
    const Slot cs = comp == 0 ? kOmegaCos : kThetaCos;
    const Slot ss = comp == 0 ? kOmegaSin : kThetaSin;
    ws.analyze(prod, tr, out.data().data(), 4, cs, ss);
  }
  return out;
}

}  // namespace

SpectralState advect_B(const SpectralState& u, const SpectralState& v) {
  if (u.n_trunc() != v.n_trunc())
    throw std::invalid_argument("advect_B: truncation mismatch");
  return advect_by(biot_savart(u), v);
}

SpectralState buoyancy_G(const SpectralState& u, const PhysParams& p) {
  SpectralState out(u.n_trunc());
  const auto& tr = u.trunc();
  for (int i = 0; i < tr.size(); ++i) {
    double dc, ds;
    deriv_coeffs(tr.mode(i), u.at(i, kThetaCos), u.at(i, kThetaSin), 0, dc, ds);
    out.at(i, kOmegaCos) = p.g * dc;
    out.at(i, kOmegaSin) = p.g * ds;
  }
  return out;
}

SpectralState dissipation_A(const SpectralState& u, const PhysParams& p) {
  SpectralState out(u.n_trunc());
  const auto& tr = u.trunc();
  for (int i = 0; i < tr.size(); ++i) {
    const double k2 = tr.mode(i).norm2();
    out.at(i, kOmegaCos) = p.nu1 * k2 * u.at(i, kOmegaCos);
    out.at(i, kOmegaSin) = p.nu1 * k2 * u.at(i, kOmegaSin);
    out.at(i, kThetaCos) = p.nu2 * k2 * u.at(i, kThetaCos);
    out.at(i, kThetaSin) = p.nu2 * k2 * u.at(i, kThetaSin);
  }
  return out;
}

SpectralState project(const SpectralState& u, int n, Band which) {
  if (n > u.n_trunc()) throw std::invalid_argument("project: N exceeds truncation");
  SpectralState out(u.n_trunc());
  const auto& tr = u.trunc();
  const long long n2 = (long long)n * n;
  for (int i = 0; i < tr.size(); ++i) {
    const bool low = tr.mode(i).norm2() <= n2;
    if ((which == Band::Low) == low)
      for (int s = 0; s < 4; ++s) out.at(i, (Slot)s) = u.at(i, (Slot)s);
  }
  return out;
}

SpectralState drift_F(const SpectralState& u, const PhysParams& p) {
  SpectralState out = dissipation_A(u, p);
  out *= -1.0;
  out -= advect_B(u, u);
  out += buoyancy_G(u, p);
  return out;
}

SpectralState grad_B(const SpectralState& u, const SpectralState& xi) {
  SpectralState out = advect_B(u, xi);
  out += advect_B(xi, u);
  return out;
}

SpectralState grad_B_adjoint(const SpectralState& u, const SpectralState& rho,
                             const PhysParams& p) {
  // <B(U,xi) + B(xi,U), rho>_w = <xi, -B(U,rho) + R>_w with
  // R = (1/zeta) * ((-Lap)^-1 curl(m), 0), m = zeta rho_om grad om_U + rho_th grad th_U.
  const int N = u.n_trunc();
  const auto& tr = u.trunc();
  const double zeta = p.omega_weight();
  auto& ws = fft::workspace(fft::pad_size(N));

  SpectralState out = advect_by(biot_savart(u), rho);
  out *= -1.0;

  // gradient coefficients of the frozen field U
  const int nm = tr.size();
  std::vector<double> dx(4 * (size_t)nm), dy(4 * (size_t)nm);
  for (int i = 0; i < nm; ++i) {
    const ModeIndex& j = tr.mode(i);
    for (int comp = 0; comp < 2; ++comp) {
      const Slot cs = comp == 0 ? kOmegaCos : kThetaCos;
      const Slot ss = comp == 0 ? kOmegaSin : kThetaSin;
      deriv_coeffs(j, u.at(i, cs), u.at(i, ss), 0, dx[4 * (size_t)i + 2 * comp],
                   dx[4 * (size_t)i + 2 * comp + 1]);
      deriv_coeffs(j, u.at(i, cs), u.at(i, ss), 1, dy[4 * (size_t)i + 2 * comp],
                   dy[4 * (size_t)i + 2 * comp + 1]);
    }
  }

  std::vector<double> grho_om, grho_th, gx, gy;
  ws.synth(tr, rho.data().data(), 4, kOmegaCos, kOmegaSin, grho_om);
  ws.synth(tr, rho.data().data(), 4, kThetaCos, kThetaSin, grho_th);

  const size_t ng = (size_t)ws.size() * ws.size();
  std::vector<double> m1(ng), m2(ng);
  ws.synth(tr, dx.data(), 4, 0, 1, gx);  // d_x omega_U
  for (size_t k = 0; k < ng; ++k) m1[k] = zeta * grho_om[k] * gx[k];
  ws.synth(tr, dy.data(), 4, 0, 1, gy);  // d_y omega_U
  for (size_t k = 0; k < ng; ++k) m2[k] = zeta * grho_om[k] * gy[k];
  ws.synth(tr, dx.data(), 4, 2, 3, gx);  // d_x theta_U
  for (size_t k = 0; k < ng; ++k) m1[k] += grho_th[k] * gx[k];
  ws.synth(tr, dy.data(), 4, 2, 3, gy);  // d_y theta_U
  for (size_t k = 0; k < ng; ++k) m2[k] += grho_th[k] * gy[k];

  std::vector<double> mc(4 * (size_t)nm);
  ws.analyze(m1, tr, mc.data(), 4, 0, 1);
  ws.analyze(m2, tr, mc.data(), 4, 2, 3);

  // (-Lap)^-1 curl m, placed in the omega component, scaled by 1/zeta
  for (int i = 0; i < nm; ++i) {
    const ModeIndex& j = tr.mode(i);
    double c2c, c2s, c1c, c1s;
    deriv_coeffs(j, mc[4 * (size_t)i + 2], mc[4 * (size_t)i + 3], 0, c2c, c2s);  // d_x m2
    deriv_coeffs(j, mc[4 * (size_t)i + 0], mc[4 * (size_t)i + 1], 1, c1c, c1s);  // d_y m1
    const double inv = 1.0 / (zeta * j.norm2());
    out.at(i, kOmegaCos) += (c2c - c1c) * inv;
    out.at(i, kOmegaSin) += (c2s - c1s) * inv;
  }
  return out;
}

SpectralState buoyancy_G_adjoint(const SpectralState& v, const PhysParams& p) {
  SpectralState out(v.n_trunc());
  const auto& tr = v.trunc();
  const double c = -p.nu1 * p.nu2 / p.g;
  for (int i = 0; i < tr.size(); ++i) {
    double dc, ds;
    deriv_coeffs(tr.mode(i), v.at(i, kOmegaCos), v.at(i, kOmegaSin), 0, dc, ds);
    out.at(i, kThetaCos) = c * dc;
    out.at(i, kThetaSin) = c * ds;
  }
  return out;
}

SpectralState grad_F(const SpectralState& u, const SpectralState& xi, const PhysParams& p) {
  SpectralState out = dissipation_A(xi, p);
  out *= -1.0;
  out -= grad_B(u, xi);
  out += buoyancy_G(xi, p);
  return out;
}

SpectralState grad_F_adjoint(const SpectralState& u, const SpectralState& rho,
                             const PhysParams& p) {
  SpectralState out = dissipation_A(rho, p);
  out *= -1.0;
  out -= grad_B_adjoint(u, rho, p);
  out += buoyancy_G_adjoint(rho, p);
  return out;
}

SpectralState noise_inject(const std::vector<double>& v, const PhysParams& p, int n_trunc) {
  const auto dirs = p.noise_directions();
  if (v.size() != dirs.size()) throw std::invalid_argument("noise_inject: dimension mismatch");
  SpectralState out(n_trunc);
  for (size_t k = 0; k < dirs.size(); ++k) {
    const auto& [dir, alpha] = dirs[k];
    const Slot s = dir.parity == 0 ? kThetaCos : kThetaSin;
    out.coeff(dir.mode, s) += alpha * v[k];
  }
  return out;
}

std::vector<double> noise_project(const SpectralState& phi, const PhysParams& p) {
  const auto dirs = p.noise_directions();
  std::vector<double> out(dirs.size());
  for (size_t k = 0; k < dirs.size(); ++k) {
    const auto& [dir, alpha] = dirs[k];
    const Slot s = dir.parity == 0 ? kThetaCos : kThetaSin;
    out[k] = alpha * kTwoPiSq * phi.coeff(dir.mode, s);
  }
  return out;
}

}  // namespace bsq
