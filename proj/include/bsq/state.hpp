// SpectralState: real cos/sin coefficients of (omega, theta) over the
// canonical mode lattice. Mean-zero by construction (no (0,0) entry).

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bsq/modes.hpp"

namespace bsq {

// Per-mode coefficient slots. Stride is 4 doubles per canonical mode.
enum Slot : int { kOmegaCos = 0, kOmegaSin = 1, kThetaCos = 2, kThetaSin = 3 };

enum class Kind { Sigma, Psi };  // sigma: theta component, psi: omega component

struct BasisElement {
  Kind kind = Kind::Sigma;
  ModeIndex index;
  int parity = 0;  // 0 = cos, 1 = sin

  Slot slot() const {
    if (kind == Kind::Sigma) return parity == 0 ? kThetaCos : kThetaSin;
    return parity == 0 ? kOmegaCos : kOmegaSin;
  }
};

class SpectralState {
 public:
  SpectralState() = default;
  explicit SpectralState(int n_trunc)
      : n_(n_trunc), a_((size_t)4 * truncation(n_trunc).size(), 0.0) {}

  int n_trunc() const { return n_; }
  const Truncation& trunc() const { return truncation(n_); }
  int n_modes() const { return (int)a_.size() / 4; }

  double& at(int mode_idx, Slot s) { return a_[(size_t)4 * mode_idx + s]; }
  double at(int mode_idx, Slot s) const { return a_[(size_t)4 * mode_idx + s]; }

  double& coeff(const ModeIndex& j, Slot s) { return a_[(size_t)4 * trunc().index_of(j) + s]; }
  double coeff(const ModeIndex& j, Slot s) const {
    return a_[(size_t)4 * trunc().index_of(j) + s];
  }

  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

  void set_zero() { a_.assign(a_.size(), 0.0); }

  // Adds c * (cos|sin)(j.x) to the given component, folding j onto Zplus2.
  // Coefficients landing outside the truncation raise; the zero mode is dropped.
  void add_folded(const ModeIndex& j, bool omega_component, int parity, double c) {
    if (j.is_zero()) return;
    auto cm = canonicalize(j);
    if (cm.flipped && (parity & 1)) c = -c;
    Slot s = omega_component ? (parity & 1 ? kOmegaSin : kOmegaCos)
                             : (parity & 1 ? kThetaSin : kThetaCos);
    coeff(cm.index, s) += c;
  }

  SpectralState& operator+=(const SpectralState& o) {
    check_same(o);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  SpectralState& operator-=(const SpectralState& o) {
    check_same(o);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  SpectralState& operator*=(double c) {
    for (double& x : a_) x *= c;
    return *this;
  }
  friend SpectralState operator+(SpectralState a, const SpectralState& b) { return a += b; }
  friend SpectralState operator-(SpectralState a, const SpectralState& b) { return a -= b; }
  friend SpectralState operator*(double c, SpectralState a) { return a *= c; }

  bool all_finite() const {
    for (double x : a_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
  }

  // Largest max-norm of a mode carrying a coefficient above eps.
  int max_active_mode(double eps = 0.0) const {
    const auto& tr = trunc();
    int deg = 0;
    for (int i = 0; i < tr.size(); ++i)
      for (int s = 0; s < 4; ++s)
        if (std::abs(a_[(size_t)4 * i + s]) > eps) deg = std::max(deg, tr.mode(i).max_norm());
    return deg;
  }

  // Keeps only the coefficients representable in a smaller truncation.
  SpectralState restricted(int new_n_trunc) const {
    SpectralState out(new_n_trunc);
    const auto& tr = out.trunc();
    for (int i = 0; i < tr.size(); ++i) {
      int k = trunc().find(tr.mode(i));
      if (k < 0) continue;
      for (int s = 0; s < 4; ++s) out.at(i, (Slot)s) = at(k, (Slot)s);
    }
    return out;
  }

  // Copies coefficients into a (larger or equal) truncation.
  SpectralState embedded(int new_n_trunc) const {
    if (new_n_trunc == n_) return *this;
    SpectralState out(new_n_trunc);
    const auto& tr = trunc();
    for (int i = 0; i < tr.size(); ++i) {
      int k = out.trunc().find(tr.mode(i));
      if (k < 0) {
        for (int s = 0; s < 4; ++s)
          if (a_[(size_t)4 * i + s] != 0.0)
            throw std::invalid_argument("embedded: nonzero coefficient outside target truncation");
        continue;
      }
      for (int s = 0; s < 4; ++s) out.at(k, (Slot)s) = a_[(size_t)4 * i + s];
    }
    return out;
  }

 private:
  void check_same(const SpectralState& o) const {
    if (n_ != o.n_) throw std::invalid_argument("SpectralState: truncation mismatch");
  }

  int n_ = 0;
  std::vector<double> a_;
};

// Coefficient dot product; the basis {sigma_j^m, psi_j^m} is orthonormal in
// this pairing (spec's "unweighted pairing").
inline double inner(const SpectralState& u, const SpectralState& v) {
  if (u.n_trunc() != v.n_trunc())
    throw std::invalid_argument("inner: truncation mismatch");
  double s = 0.0;
  const auto& a = u.data();
  const auto& b = v.data();
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const SpectralState& u) { return std::sqrt(inner(u, u)); }

}  // namespace bsq
