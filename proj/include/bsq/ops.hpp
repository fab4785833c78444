// Spectral-core operators: trigonometric basis, weighted norms, Biot-Savart
// inversion, advection B, buoyancy G, dissipation A, projections, drift F,
// and the weighted adjoints of the linearized operators.

#pragma once

#include "bsq/params.hpp"
#include "bsq/state.hpp"

namespace bsq {

// Velocity field u = (u1, u2), coefficients with stride 4: u1c,u1s,u2c,u2s.
struct Velocity {
  explicit Velocity(int n_trunc)
      : n_trunc(n_trunc), a((size_t)4 * truncation(n_trunc).size(), 0.0) {}
  int n_trunc;
  std::vector<double> a;
};

SpectralState basis_vector(const BasisElement& b, int n_trunc);

// Weighted inner product of eq-type H: (nu1 nu2/g^2)<omega,omega'> + <theta,theta'>
// with the physical L^2 pairing on [-pi,pi]^2 (Parseval factor 2*pi^2 per mode).
double weighted_inner(const SpectralState& u, const SpectralState& v, const PhysParams& p);
double weighted_norm(const SpectralState& u, const PhysParams& p);

// Weighted H^s norm via the multiplier |j|^(2s); s >= -2 supported.
double sobolev_norm(const SpectralState& u, const PhysParams& p, double s);

// u = K * omega: unique mean-zero divergence-free field with curl u = omega.
Velocity biot_savart(const SpectralState& u);

// Spectral curl / divergence of a velocity field (for verification).
SpectralState curl_of(const Velocity& vel);       // result in omega component
SpectralState divergence_of(const Velocity& vel); // result in omega component

// B(U,V) = ((K*omega_U).grad omega_V, (K*omega_U).grad theta_V), dealiased.
SpectralState advect_B(const SpectralState& u, const SpectralState& v);

// G U = (g d_x theta, 0).
SpectralState buoyancy_G(const SpectralState& u, const PhysParams& p);

// A U = (-nu1 Lap omega, -nu2 Lap theta).
SpectralState dissipation_A(const SpectralState& u, const PhysParams& p);

enum class Band { Low, High };

// P_N (Euclidean |j| <= N) and Q_N = I - P_N.
SpectralState project(const SpectralState& u, int n, Band which);

// F(U) = -A U - B(U,U) + G U.
SpectralState drift_F(const SpectralState& u, const PhysParams& p);

// Linearization of B around U: grad B(U) xi = B(U, xi) + B(xi, U).
SpectralState grad_B(const SpectralState& u, const SpectralState& xi);

// Adjoint of grad B(U) with respect to the weighted inner product.
SpectralState grad_B_adjoint(const SpectralState& u, const SpectralState& rho,
                             const PhysParams& p);

// Adjoint of G with respect to the weighted inner product:
// G* V = (0, -(nu1 nu2 / g) d_x omega_V).
SpectralState buoyancy_G_adjoint(const SpectralState& v, const PhysParams& p);

// grad F(U) xi = -A xi - grad B(U) xi + G xi and its weighted adjoint.
SpectralState grad_F(const SpectralState& u, const SpectralState& xi, const PhysParams& p);
SpectralState grad_F_adjoint(const SpectralState& u, const SpectralState& rho,
                             const PhysParams& p);

// sigma_theta v: injects the d-dimensional noise vector into theta components.
SpectralState noise_inject(const std::vector<double>& v, const PhysParams& p, int n_trunc);

// sigma_theta^* phi: the d weighted pairings <alpha_k^l sigma_k^l, phi>.
std::vector<double> noise_project(const SpectralState& phi, const PhysParams& p);

}  // namespace bsq
