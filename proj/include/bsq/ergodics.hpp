// Empirical ergodicity diagnostics: time averages, exponential moments,
// synchronous-coupling decay, LLN/CLT probes, mixing-rate fits, and the
// exponentially weighted path metric rho_r.

#pragma once

#include "bsq/integrator.hpp"

namespace bsq {

struct Observable {
  enum class Kind { ModeCoefficient, WeightedEnergy, Enstrophy, CustomQuadratic };
  Kind kind = Kind::WeightedEnergy;
  BasisElement element;                                   // for ModeCoefficient
  std::vector<std::pair<BasisElement, double>> weights;   // for CustomQuadratic
  double varsigma = 1.0;                                  // growth weight of its class

  double operator()(const SpectralState& u, const PhysParams& p) const;
  static Observable mode_coefficient(const BasisElement& b);
  static Observable weighted_energy();
  static Observable enstrophy();
};

// (1/(T - burn_in)) * int Phi(U(t)) dt by the trapezoid rule.
double time_average(const Trajectory& traj, const Observable& phi, double burn_in);

struct ExpMomentReport {
  double estimate_full = 0.0;   // MC estimate of the exponential functional
  double estimate_half = 0.0;   // same over the first half of the samples
  double bound = 0.0;           // exp(eta e^{-kappa T/2} ||U0||^2), C = 1
  double ratio = 0.0;           // estimate_full / bound
  bool overflowed = false;      // eta too large: exponent exceeded range
  int samples = 0;
};

// MC estimate of E exp(eta ||U(T)||^2 + eta (kappa/4) e^{-kappa T/4} int ||U||_H1^2).
ExpMomentReport exp_moment_probe(const PhysParams& p, int n_trunc, double eta, double T,
                                 double dt, int samples, uint64_t seed, int workers = 0);

struct CouplingReport {
  std::vector<double> times;
  std::vector<double> mean_log_diff;  // E log ||U1 - U2|| over realizations
  double slope = 0.0;                 // least-squares slope of the mean log difference
};

// Evolves both initial states under identical noise; reports E log||U1-U2||.
CouplingReport coupling_decay(const PhysParams& p, const SpectralState& u01,
                              const SpectralState& u02, double horizon, double dt, int samples,
                              uint64_t seed, int workers = 0);

struct CltReport {
  double variance = 0.0;      // empirical variance of (1/sqrt(T')) int (Phi - mean) dt
  double ks_distance = 0.0;   // Kolmogorov-Smirnov distance to the fitted normal
  int samples = 0;
  std::vector<double> values;  // the normalized integrals, sorted
};

CltReport clt_histogram(const PhysParams& p, int n_trunc, const Observable& phi, double T,
                        double dt, int samples, uint64_t seed, int workers = 0);

struct RhoDistance {
  double value = 0.0;        // straight-line upper bound of the path functional
  double lower = 0.0;        // ||U1 - U2||  (weighted norm)
  double upper = 0.0;        // exp(varsigma r max_i ||U_i||^2) ||U1 - U2||
};

// Straight-line quadrature of int_0^1 exp(varsigma r ||gamma||^2) ||gamma'||;
// an upper bound on the infimum over paths ("UB").
RhoDistance rho_r_distance(const SpectralState& u1, const SpectralState& u2, double r,
                           double varsigma, const PhysParams& p, int quad_points = 129);

struct MixingCurve {
  std::vector<double> times;
  std::vector<double> residual;  // |E Phi(U(t,U0)) - pooled long-run mean|
  double fitted_rate = 0.0;      // exponential rate from log-residual LSQ
};

struct MixingReport {
  double pooled_mean = 0.0;
  std::vector<MixingCurve> curves;  // one per initial condition
};

// Tracks the decay of observable expectations toward the pooled long-run
// mean for several initial conditions; diagnostic only.
MixingReport mixing_probe(const PhysParams& p, const Observable& phi,
                          const std::vector<SpectralState>& u0s, double horizon, double dt,
                          int samples, uint64_t seed, int workers = 0);

}  // namespace bsq
