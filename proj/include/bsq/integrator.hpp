// Exponential (integrating-factor) Euler-Maruyama time stepping for the
// stochastic Boussinesq system, the shifted variable, and trajectory storage.
//
// One step: U_{i+1} = e^{-A dt} (U_i + dt (G U_i - B(U_i,U_i))) + eta_i where
// eta_i injects the additive noise with the exact per-mode variance of the
// stochastic convolution int e^{-A(t-s)} sigma_theta dW.

#pragma once

#include <optional>

#include "bsq/noise.hpp"
#include "bsq/ops.hpp"

namespace bsq {

struct StepOptions {
  bool use_B = true;  // advective nonlinearity
  bool use_G = true;  // buoyancy coupling
};

struct BlowUpError : std::runtime_error {
  BlowUpError(int step, double magnitude)
      : std::runtime_error("coefficient blow-up at step " + std::to_string(step) +
                           " (|coeff| = " + std::to_string(magnitude) + ")"),
        step(step),
        magnitude(magnitude) {}
  int step;
  double magnitude;
};

// Largest coefficient magnitude tolerated before the scheme reports blow-up.
inline constexpr double kBlowUpThreshold = 1e12;

// One exponential-Euler step; dW holds d raw Wiener increments (N(0,dt)).
SpectralState step(const SpectralState& u, const PhysParams& p, double dt,
                   const std::vector<double>& dW, const StepOptions& opts = {});

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  PhysParams params;
  uint64_t noise_seed = 0;
  StepOptions opts;                   // which drift terms were active
  std::vector<SpectralState> states;  // one per grid node, uniform step

  int n_steps() const { return (int)states.size() - 1; }
  double horizon() const { return t0 + n_steps() * dt; }
  double time(int i) const { return t0 + i * dt; }
  const SpectralState& state(int i) const { return states[(size_t)i]; }
  int n_trunc() const { return states.empty() ? 0 : states.front().n_trunc(); }

  std::vector<double> times() const {
    std::vector<double> t(states.size());
    for (size_t i = 0; i < t.size(); ++i) t[i] = t0 + (double)i * dt;
    return t;
  }

  // Nearest grid index of a time value; throws if not grid-aligned.
  int grid_index(double t, double tol = 1e-9) const {
    const double x = (t - t0) / dt;
    const int i = (int)std::llround(x);
    if (i < 0 || i > n_steps() || std::abs(x - i) > tol)
      throw std::invalid_argument("time not aligned with the trajectory grid");
    return i;
  }
};

// Integrates over [0, T] using path increments (path must cover T).
Trajectory evolve(const SpectralState& u0, const PhysParams& p, double T, const NoisePath& path,
                  const StepOptions& opts = {});

// Shifted variable Ubar(t) = U(t) - sigma_theta W(t), integrated from
// dUbar/dt = F(Ubar + sigma_theta W); C^1 in time.
Trajectory evolve_shifted(const SpectralState& u0, const PhysParams& p, double T,
                          const NoisePath& path, const StepOptions& opts = {});

// Per-mode noise scaling used by step(): sqrt((1 - e^{-2 nu |k|^2 dt})/(2 nu |k|^2 dt)),
// which makes the discrete linear statistics exact.
double noise_variance_factor(double lambda, double dt);

}  // namespace bsq
