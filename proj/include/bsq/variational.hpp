// Tangent flow J_{s,t}, second variation, and adjoint flow K_{s,t} along a
// stored trajectory.
//
// The tangent step is the exact Jacobian of the nonlinear step, and the
// adjoint step is its exact transpose in the weighted inner product (same
// frozen snapshot per interval), so <J xi, phi> = <xi, K phi> holds to
// roundoff on the discrete level.

#pragma once

#include "bsq/integrator.hpp"

namespace bsq {

// One tangent step across [t_i, t_{i+1}] frozen at the snapshot u_i.
SpectralState tangent_step(const SpectralState& xi, const SpectralState& u_i,
                           const PhysParams& p, double dt, const StepOptions& opts);

// One adjoint step across the same interval (transpose of tangent_step).
SpectralState adjoint_step(const SpectralState& phi, const SpectralState& u_i,
                           const PhysParams& p, double dt, const StepOptions& opts);

// J_{s,t} xi for grid-aligned s = t_is, t = t_it.
SpectralState tangent_J(const Trajectory& traj, int is, int it, const SpectralState& xi);
SpectralState tangent_J(const Trajectory& traj, double s, double t, const SpectralState& xi);

// K_{s,t} phi, solved backward from phi at t.
SpectralState adjoint_K(const Trajectory& traj, int is, int it, const SpectralState& phi);
SpectralState adjoint_K(const Trajectory& traj, double s, double t, const SpectralState& phi);

// K_{r,t} phi for every grid node r in [s,t]; result[k] = K_{t_{is+k}, t_it} phi.
std::vector<SpectralState> adjoint_sweep(const Trajectory& traj, int is, int it,
                                         const SpectralState& phi);

// Second variation: solves the tangent equation with the bilinear source
// -(B(J xi, J xi') + B(J xi', J xi)) and zero initial data.
SpectralState second_variation_J2(const Trajectory& traj, int is, int it,
                                  const SpectralState& xi, const SpectralState& xi2);

struct FdCheckReport {
  double relative = 0.0;  // ||(U+ - U-)/2h - J xi|| / ||J xi||  (0/0 guarded)
  double absolute = 0.0;
  double tangent_norm = 0.0;
};

// Reruns the flow from U0 +- h xi with the identical noise path and compares
// the centered difference against the tangent solve.
FdCheckReport fd_tangent_check(const SpectralState& u0, const PhysParams& p, double T,
                               const NoisePath& path, const SpectralState& xi, double h,
                               const StepOptions& opts = {});

}  // namespace bsq
