#include "bsq/integrator.hpp"

namespace bsq {

NoisePath make_noise_path(uint64_t seed, double dt, int n_steps, int d) {
  if (!(dt > 0.0)) throw std::invalid_argument("make_noise_path: dt must be positive");
  NoisePath path;
  path.dt = dt;
  path.d = d;
  path.seed = seed;
  path.increments.resize((size_t)n_steps * d);
  Gaussian gen(seed);
  const double sd = std::sqrt(dt);
  for (double& x : path.increments) x = sd * gen();
  return path;
}

double noise_variance_factor(double lambda, double dt) {
  const double x = 2.0 * lambda * dt;
  if (x < 1e-8) return 1.0 - 0.25 * x;  // series limit of sqrt((1-e^-x)/x)
  return std::sqrt((1.0 - std::exp(-x)) / x);
}

namespace {

// U + dt * (G U - B(U,U)) per StepOptions, shared by step() and the tangent
// machinery (which differentiates exactly this map).
SpectralState explicit_part(const SpectralState& u, const PhysParams& p, double dt,
                            const StepOptions& opts) {
  SpectralState v = u;
  if (opts.use_G) {
    SpectralState gu = buoyancy_G(u, p);
    gu *= dt;
    v += gu;
  }
  if (opts.use_B) {
    SpectralState bu = advect_B(u, u);
    bu *= dt;
    v -= bu;
  }
  return v;
}

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

void inject_noise(SpectralState& v, const PhysParams& p, double dt,
                  const std::vector<double>& dW) {
  const auto dirs = p.noise_directions();
  if (dW.size() != dirs.size()) throw std::invalid_argument("step: noise dimension mismatch");
  for (size_t k = 0; k < dirs.size(); ++k) {
    const auto& [dir, alpha] = dirs[k];
    const double lambda = p.nu2 * dir.mode.norm2();
    const Slot s = dir.parity == 0 ? kThetaCos : kThetaSin;
    v.coeff(dir.mode, s) += alpha * noise_variance_factor(lambda, dt) * dW[k];
  }
}

}  // namespace

SpectralState step(const SpectralState& u, const PhysParams& p, double dt,
                   const std::vector<double>& dW, const StepOptions& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  SpectralState v = explicit_part(u, p, dt, opts);
  apply_semigroup(v, p, dt);
  inject_noise(v, p, dt, dW);
  return v;
}

Trajectory evolve(const SpectralState& u0, const PhysParams& p, double T, const NoisePath& path,
                  const StepOptions& opts) {
  const int n = T > 0.0 ? (int)std::llround(T / path.dt) : 0;
  if (std::abs(n * path.dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("evolve: T must be a multiple of the path step");
  if (n > path.n_steps()) throw std::invalid_argument("evolve: path does not cover [0,T]");
  if ((int)p.alphas.size() != path.d) throw std::invalid_argument("evolve: noise dim mismatch");

  Trajectory traj;
  traj.dt = path.dt;
  traj.params = p;
  traj.noise_seed = path.seed;
  traj.opts = opts;
  traj.states.reserve((size_t)n + 1);
  traj.states.push_back(u0);
  std::vector<double> dW((size_t)path.d);
  for (int i = 0; i < n; ++i) {
    const double* inc = path.step_increments(i);
    std::copy(inc, inc + path.d, dW.begin());
    SpectralState next = step(traj.states.back(), p, path.dt, dW, opts);
    const double m = next.max_abs();
    if (!next.all_finite() || m > kBlowUpThreshold) throw BlowUpError(i + 1, m);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Trajectory evolve_shifted(const SpectralState& u0, const PhysParams& p, double T,
                          const NoisePath& path, const StepOptions& opts) {
  const int n = T > 0.0 ? (int)std::llround(T / path.dt) : 0;
  if (std::abs(n * path.dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("evolve_shifted: T must be a multiple of the path step");
  if (n > path.n_steps()) throw std::invalid_argument("evolve_shifted: path too short");

  Trajectory traj;
  traj.dt = path.dt;
  traj.params = p;
  traj.noise_seed = path.seed;
  traj.opts = opts;
  traj.states.reserve((size_t)n + 1);
  traj.states.push_back(u0);

  const double dt = path.dt;
  std::vector<double> w((size_t)path.d, 0.0);
  for (int i = 0; i < n; ++i) {
    const SpectralState& ub = traj.states.back();
    SpectralState u_full = ub + noise_inject(w, p, ub.n_trunc());
    // dUbar/dt + A Ubar = -A sigma W - B(U) + G U, integrating factor on Ubar
    SpectralState rhs = dissipation_A(noise_inject(w, p, ub.n_trunc()), p);
    rhs *= -1.0;
    if (opts.use_B) rhs -= advect_B(u_full, u_full);
    if (opts.use_G) rhs += buoyancy_G(u_full, p);
    rhs *= dt;
    SpectralState next = ub + rhs;
    apply_semigroup(next, p, dt);
    const double m = next.max_abs();
    if (!next.all_finite() || m > kBlowUpThreshold) throw BlowUpError(i + 1, m);
    traj.states.push_back(std::move(next));
    const double* inc = path.step_increments(i);
    for (int k = 0; k < path.d; ++k) w[(size_t)k] += inc[k];
  }
  return traj;
}

}  // namespace bsq
