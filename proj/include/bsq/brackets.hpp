// Lie-bracket calculus on the phase space: the vector fields Y = [F, sigma],
// Z = [F, Y], the U-independent brackets [Z, sigma], the psi-direction
// generation with theta-only error terms, span generation over the mode
// lattice, and the quadratic forms over the approximate bracket basis.

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bsq/integrator.hpp"

namespace bsq {

struct TruncationOverflow : std::runtime_error {
  explicit TruncationOverflow(const std::string& what) : std::runtime_error(what) {}
};

// A vector field on the truncated phase space.
struct VectorField {
  std::function<SpectralState(const SpectralState&)> eval;
  bool affine = false;
  std::string descriptor;

  SpectralState operator()(const SpectralState& u) const { return eval(u); }
};

VectorField const_field(const SpectralState& value, std::string descriptor = "const");
VectorField drift_field(const PhysParams& p);

// Central-difference Lie bracket [E1,E2](U) = grad E2(U) E1(U) - grad E1(U) E2(U);
// the independent oracle for every closed form below.
SpectralState bracket_fd(const VectorField& e1, const VectorField& e2, const SpectralState& u,
                         double h);

// Directional derivative grad E(U) X by central differences (exact for
// fields of polynomial degree <= 2, i.e. everything in this module).
SpectralState directional_fd(const VectorField& e, const SpectralState& u,
                             const SpectralState& x, double h);

// Symbolic combination of basis elements (already canonicalized).
struct LinComb {
  std::vector<std::pair<BasisElement, double>> terms;
  SpectralState materialize(int n_trunc) const;
};

// Y_j^m(U) = [F(U), sigma_j^m] = nu2 |j|^2 sigma_j^m + (-1)^m g j1 psi_j^{m+1} + B(U, sigma_j^m).
SpectralState field_Y(const ModeIndex& j, int m, const SpectralState& u, const PhysParams& p);
VectorField Y_field(const ModeIndex& j, int m, const PhysParams& p, int n_trunc);

// Z_j^m(U) = [F(U), Y_j^m(U)], evaluated from the closed form.
SpectralState field_Z(const ModeIndex& j, int m, const SpectralState& u, const PhysParams& p);
VectorField Z_field(const ModeIndex& j, int m, const PhysParams& p, int n_trunc);

// Closed forms of B on basis pairs (exact trigonometric products):
// B(psi_j^m, sigma_k^m') and B(psi_j^m, psi_k^m').
LinComb closed_B_psi_sigma(const ModeIndex& j, int m, const ModeIndex& k, int m2);
LinComb closed_B_psi_psi(const ModeIndex& j, int m, const ModeIndex& k, int m2);

// [Z_j^m(U), sigma_k^m']: U-independent, pure sigma combination.
LinComb bracket_Z_sigma(const ModeIndex& j, int m, const ModeIndex& k, int m2,
                        const PhysParams& p);

// a(j,k) = j1/|j|^2 + k1/|k|^2 and b(j,k) = j1/|j|^2 - k1/|k|^2 as exact fractions.
struct Fraction {
  long long num = 0, den = 1;
  bool nonzero() const { return num != 0; }
  double value() const { return (double)num / (double)den; }
};
Fraction coeff_a(const ModeIndex& j, const ModeIndex& k);
Fraction coeff_b(const ModeIndex& j, const ModeIndex& k);

// One generation recipe: a +-1 combination of two [Z_j, sigma_k] brackets
// producing prefactor * sigma_target^parity.
struct SigmaRecipe {
  ModeIndex target;      // canonical
  int parity = 0;
  ModeIndex j, k;        // source pair
  bool sum = true;       // target built from j+k (else j-k)
  int sign_fold = 1;     // folding sign applied to the canonical target
  // combination [Z_j^{ma}, sigma_k^{mb}] * ca + [Z_j^{mc}, sigma_k^{md}] * cd
  int ma = 0, mb = 0, ca = 1, mc = 0, md = 0, cd = 1;
  Fraction ab;           // a(j,k) or b(j,k)
  long long cross = 0;   // j^perp . k
  double prefactor(double g) const { return g * (double)cross * ab.value() * sign_fold; }
  bool reachable() const { return cross != 0 && ab.nonzero(); }
};

// The four Prop-5.2-type combinations for the pair (j,k).
std::vector<SigmaRecipe> generate_sigma(const ModeIndex& j, const ModeIndex& k);

// [Z_j^m(U), Y_k^m'(U)] evaluated directly from the derivative expansion.
SpectralState bracket_Z_Y(const ModeIndex& j, int m, const ModeIndex& k, int m2,
                          const SpectralState& u, const PhysParams& p);

// The explicit (psi-psi advection + G B) part of [Z,Y]; the remainder
// H = [Z,Y] - explicit is affine in U and concentrated in theta.
SpectralState zy_explicit_part(const ModeIndex& j, int m, const ModeIndex& k, int m2,
                               int n_trunc, const PhysParams& p);
SpectralState zy_remainder_H(const ModeIndex& j, int m, const ModeIndex& k, int m2,
                             const SpectralState& u, const PhysParams& p);

struct PsiWithError {
  SpectralState combo;  // psi_j^m + J_{j,m}(U)
  SpectralState junk;   // J_{j,m}(U), theta-only and affine in U
};

// psi_j^m + J_{j,m}(U) assembled from the bracket identities:
// j1 != 0: ((-1)^{m+1}/(g j1)) Y_j^{m+1}(U); j1 = 0: the [Z_{j+e1}, Y_{e1}]
// combinations scaled by |j+e1|^2/(g^2 |j|^3).
PsiWithError psi_with_error(const ModeIndex& j, int m, const SpectralState& u,
                            const PhysParams& p);

struct JunkTail {
  SpectralState tail;  // Q_Ntilde J_{j,m}(U)
  double weighted;     // its weighted norm
  double coefficient;  // its coefficient-pairing norm
};
JunkTail junk_tail(const ModeIndex& j, int m, const SpectralState& u, const PhysParams& p,
                   int n_tilde);

// I_N = { j in Zplus2 : |j1|+|j2| <= N+1 } minus the four axis corners.
std::vector<ModeIndex> set_I_N(int n);

struct PsiCoverage {
  ModeIndex index;
  std::string branch;  // "direct" (j1 != 0) or "axis" (j1 == 0)
};

struct SpanLedger {
  std::vector<ModeIndex> forced;
  int depth_reached = 0;
  bool covered = false;                      // all I_N sigma and psi targets
  std::vector<ModeIndex> sigma_modes;        // generated, in discovery order
  std::vector<int> sigma_depth;              // per generated mode
  std::vector<SigmaRecipe> recipes;          // first recipe per generated mode
  std::vector<PsiCoverage> psi_modes;        // psi directions reachable
  std::vector<ModeIndex> uncovered_sigma;    // I_N targets not reached
  std::vector<ModeIndex> uncovered_psi;
};

// BFS over admissible moves with exact integer certificates for the
// prefactors; lattice capped at |j1|+|j2| <= lattice_cap.
SpanLedger generate_span(const std::vector<ModeIndex>& forced, int n, int depth_cap,
                         int lattice_cap = -1);

// <Q_{N,Ntilde}(U) phi, phi> = sum over the approximate basis of squared
// coefficient pairings; U and phi must carry enough truncation headroom.
double quad_form_Q(int n, int n_tilde, const SpectralState& u, const SpectralState& phi,
                   const PhysParams& p);

// Chain elements whose pairings against K_{t,T} phi the cascade probe tracks.
struct ChainElement {
  enum class Type { Sigma, Y, Z, ZSigma, ZY } type = Type::Sigma;
  ModeIndex j;
  int m = 0;
  ModeIndex k;  // second index for ZSigma / ZY
  int m2 = 0;
  std::string label() const;
};

struct CascadeSeries {
  ChainElement element;
  std::vector<double> g;            // g_phi(t) on the [T/2,T] grid
  double sup_g = 0.0;
  double max_fd_residual = 0.0;     // |dg/dt - <K phi, [F,E]>| (interior nodes)
  double sup_dg = 0.0;
};

struct CascadeReport {
  std::vector<double> times;
  std::vector<CascadeSeries> series;
};

CascadeReport cascade_probe(const Trajectory& traj, const NoisePath& path,
                            const SpectralState& phi, const std::vector<ChainElement>& chain,
                            int work_n_trunc);

}  // namespace bsq
