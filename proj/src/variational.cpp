#include "bsq/variational.hpp"

namespace bsq {

namespace {

void apply_semigroup(SpectralState& v, const PhysParams& p, double dt) {
  const auto& tr = v.trunc();
  for (int i = 0; i < tr.size(); ++i) {
    const double k2 = tr.mode(i).norm2();
    const double mo = std::exp(-p.nu1 * k2 * dt);
    const double mt = std::exp(-p.nu2 * k2 * dt);
    v.at(i, kOmegaCos) *= mo;
    v.at(i, kOmegaSin) *= mo;
    v.at(i, kThetaCos) *= mt;
    v.at(i, kThetaSin) *= mt;
  }
}

void check_range(const Trajectory& traj, int is, int it) {
  if (is < 0 || it > traj.n_steps() || is > it)
    throw std::invalid_argument("flow request outside the stored trajectory");
}

}  // namespace

SpectralState tangent_step(const SpectralState& xi, const SpectralState& u_i,
                           const PhysParams& p, double dt, const StepOptions& opts) {
  SpectralState v = xi;
  if (opts.use_G) {
    SpectralState g = buoyancy_G(xi, p);
    g *= dt;
    v += g;
  }
  if (opts.use_B) {
    SpectralState b = grad_B(u_i, xi);
    b *= dt;
    v -= b;
  }
  apply_semigroup(v, p, dt);
  return v;
}

SpectralState adjoint_step(const SpectralState& phi, const SpectralState& u_i,
                           const PhysParams& p, double dt, const StepOptions& opts) {
  SpectralState v = phi;
  apply_semigroup(v, p, dt);
  SpectralState out = v;
  if (opts.use_G) {
    SpectralState g = buoyancy_G_adjoint(v, p);
    g *= dt;
    out += g;
  }
  if (opts.use_B) {
    SpectralState b = grad_B_adjoint(u_i, v, p);
    b *= dt;
    out -= b;
  }
  return out;
}

SpectralState tangent_J(const Trajectory& traj, int is, int it, const SpectralState& xi) {
  check_range(traj, is, it);
  SpectralState v = xi;
  for (int i = is; i < it; ++i) v = tangent_step(v, traj.state(i), traj.params, traj.dt, traj.opts);
  return v;
}

SpectralState tangent_J(const Trajectory& traj, double s, double t, const SpectralState& xi) {
  return tangent_J(traj, traj.grid_index(s), traj.grid_index(t), xi);
}

SpectralState adjoint_K(const Trajectory& traj, int is, int it, const SpectralState& phi) {
  check_range(traj, is, it);
  SpectralState v = phi;
  for (int i = it - 1; i >= is; --i)
    v = adjoint_step(v, traj.state(i), traj.params, traj.dt, traj.opts);
  return v;
}

SpectralState adjoint_K(const Trajectory& traj, double s, double t, const SpectralState& phi) {
  return adjoint_K(traj, traj.grid_index(s), traj.grid_index(t), phi);
}

std::vector<SpectralState> adjoint_sweep(const Trajectory& traj, int is, int it,
                                         const SpectralState& phi) {
  check_range(traj, is, it);
  std::vector<SpectralState> out((size_t)(it - is + 1), SpectralState(phi.n_trunc()));
  out[(size_t)(it - is)] = phi;
  for (int i = it - 1; i >= is; --i)
    out[(size_t)(i - is)] =
        adjoint_step(out[(size_t)(i - is + 1)], traj.state(i), traj.params, traj.dt, traj.opts);
  return out;
}

SpectralState second_variation_J2(const Trajectory& traj, int is, int it,
                                  const SpectralState& xi, const SpectralState& xi2) {
  check_range(traj, is, it);
  SpectralState a = xi, b = xi2, rho(xi.n_trunc());
  for (int i = is; i < it; ++i) {
    const SpectralState& u = traj.state(i);
    SpectralState v = rho;
    if (traj.opts.use_G) {
      SpectralState g = buoyancy_G(rho, traj.params);
      g *= traj.dt;
      v += g;
    }
    if (traj.opts.use_B) {
      SpectralState lin = grad_B(u, rho);
      SpectralState src = advect_B(a, b);
      src += advect_B(b, a);
      lin += src;
      lin *= traj.dt;
      v -= lin;
    }
    apply_semigroup(v, traj.params, traj.dt);
    rho = std::move(v);
    a = tangent_step(a, u, traj.params, traj.dt, traj.opts);
    b = tangent_step(b, u, traj.params, traj.dt, traj.opts);
  }
  return rho;
}

FdCheckReport fd_tangent_check(const SpectralState& u0, const PhysParams& p, double T,
                               const NoisePath& path, const SpectralState& xi, double h,
                               const StepOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_tangent_check: h must be positive");
  FdCheckReport rep;
  Trajectory base = evolve(u0, p, T, path, opts);
  const int it = base.n_steps();
  SpectralState jx = tangent_J(base, 0, it, xi);
  rep.tangent_norm = norm(jx);

  SpectralState up = u0, um = u0;
  SpectralState hxi = xi;
  hxi *= h;
  up += hxi;
  um -= hxi;
  Trajectory tp = evolve(up, p, T, path, opts);
  Trajectory tm = evolve(um, p, T, path, opts);
  SpectralState diff = tp.state(it) - tm.state(it);
  diff *= 1.0 / (2.0 * h);
  diff -= jx;
  rep.absolute = norm(diff);
  rep.relative = rep.tangent_norm > 0.0 ? rep.absolute / rep.tangent_norm : 0.0;
  return rep;
}

}  // namespace bsq
