// Malliavin covariance machinery: the random operators A_{s,t}, A*_{s,t},
// the Gram matrix of M_{s,t} on the truncated basis, cone-restricted
// spectral minimization, and the regularized iterative control.
//
// Matrix coordinates are weighted-orthonormal: a state maps to the vector of
// its coefficients scaled so the weighted inner product becomes Euclidean.
// The canonical basis directions stay axis-aligned, so P_N is diagonal.

#pragma once

#include <functional>

#include "bsq/variational.hpp"

namespace bsq {

// State <-> weighted-orthonormal coordinates.
class GramBasis {
 public:
  GramBasis(int n_trunc, const PhysParams& p);
  int dim() const { return (int)scale_.size(); }
  int n_trunc() const { return n_; }
  std::vector<double> to_vector(const SpectralState& u) const;
  SpectralState to_state(const std::vector<double>& v) const;
  // Coordinates with Euclidean mode norm <= N (the range of P_N).
  const std::vector<int>& low_coords(int N) const;

 private:
  int n_;
  std::vector<double> scale_;  // sqrt of the weighted norm of each basis direction
  mutable std::map<int, std::vector<int>> low_cache_;
};

struct GramMatrix {
  int n_trunc = 0;
  double s = 0.0, t = 0.0;
  int quadrature_steps = 0;
  std::vector<double> entries;  // dense dim x dim, row-major, symmetric

  int dim() const { return entries.empty() ? 0 : (int)std::llround(std::sqrt((double)entries.size())); }
  double& at(int i, int j) { return entries[(size_t)i * dim() + j]; }
  double at(int i, int j) const { return entries[(size_t)i * dim() + j]; }
  double trace() const {
    double tr = 0.0;
    for (int i = 0; i < dim(); ++i) tr += at(i, i);
    return tr;
  }
};

// A*_{s,t} phi: for every grid node r in [s,t], the d pairings
// <alpha_k^l sigma_k^l, K_{r,t} phi>_H. Row r-is holds the d values.
std::vector<std::vector<double>> apply_Astar(const Trajectory& traj, int is, int it,
                                             const SpectralState& phi);

// A_{s,t} v = int_s^t J_{r,t} sigma_theta v(r) dr, trapezoid on the grid;
// v[k] holds the d components at node is+k.
SpectralState apply_Aop(const Trajectory& traj, int is, int it,
                        const std::vector<std::vector<double>>& v);

// Gram matrix of M_{s,t} = A_{s,t} A*_{s,t} over the weighted-orthonormal
// canonical basis; one backward sweep per basis vector.
GramMatrix assemble_M(const Trajectory& traj, int is, int it);

struct ConeSpec {
  double alpha = 0.5;  // in (0,1]
  int N = 1;
};

struct ConeMinResult {
  double value = 0.0;
  std::vector<double> argmin;   // unit vector in weighted-orthonormal coords
  double min_eigenvalue = 0.0;  // unconstrained minimum, for reference
  bool boundary = false;        // true if the KKT boundary branch was taken
};

// min over unit phi with ||P_N phi||^2 >= alpha of <M phi, phi>; exact KKT
// with bisection on the boundary multiplier.
ConeMinResult cone_min(const GramMatrix& m, const ConeSpec& cone,
                       double constraint_tol = 1e-10);

struct ControlStage {
  std::vector<std::vector<double>> v;  // control on [n, n+1], zero on [n+1, n+2]
  SpectralState rho_next;              // rho_{n+2}
  SpectralState residual;              // beta (M+beta I)^-1 J rho_n at time n+1
};

// One stage of the iterative construction: v = A* (M+beta)^-1 J rho_n on
// [n,n+1] and rho_{n+2} = J_{n+1,n+2} beta (M+beta)^-1 J_{n,n+1} rho_n.
ControlStage regularized_control(const Trajectory& traj, int n_index, int steps_per_unit,
                                 double beta, const SpectralState& rho_n);

struct ControlDecayReport {
  std::vector<double> stage_moment;      // E ||rho_n||^8 for n = 0,2,...,K
  double contraction = 0.0;              // geometric per-stage factor
  double ci_low = 0.0, ci_high = 0.0;    // 95% bootstrap interval
  int samples = 0;
};

ControlDecayReport control_decay_experiment(const PhysParams& p, int n_trunc, double dt,
                                            double beta, int n_stages, int samples,
                                            uint64_t seed, int workers = 0);

struct ItoIsometryReport {
  double sample_variance = 0.0;
  double expected = 0.0;
  double standard_error = 0.0;  // of the sample variance estimate
  int samples = 0;
  bool within(double n_se) const {
    return std::abs(sample_variance - expected) <= n_se * standard_error;
  }
};

// Checks E (sum_i v_i . dW_i)^2 = E sum_i |v_i|^2 dt for an adapted control
// generator: gen(w_prefix, t_index) must read only past increments.
using AdaptedControl =
    std::function<std::vector<double>(const std::vector<double>& w_cum, int t_index)>;
ItoIsometryReport ito_isometry_check(const AdaptedControl& gen, double expected, int d, double dt,
                                     int n_steps, int samples, uint64_t seed);

}  // namespace bsq
