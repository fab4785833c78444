// Canonical Fourier mode indexing on the square torus [-pi,pi]^2.
//
// Real trigonometric fields are stored over the canonical half-lattice
//   Zplus2 = { j = (j1,j2) != 0 : j1 > 0, or j1 = 0 and j2 > 0 },
// so that cos(j.x), sin(j.x) with j in Zplus2 enumerate a real basis once.
// Any nonzero integer pair folds onto Zplus2 with the reflection rule
// cos(-j.x) = cos(j.x), sin(-j.x) = -sin(j.x).

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bsq {

struct ModeIndex {
  int j1 = 0;
  int j2 = 0;

  friend bool operator==(const ModeIndex& a, const ModeIndex& b) {
    return a.j1 == b.j1 && a.j2 == b.j2;
  }
  friend bool operator!=(const ModeIndex& a, const ModeIndex& b) { return !(a == b); }

  int norm2() const { return j1 * j1 + j2 * j2; }
  double norm() const { return std::sqrt(double(norm2())); }
  int max_norm() const { return std::max(std::abs(j1), std::abs(j2)); }
  bool is_zero() const { return j1 == 0 && j2 == 0; }
  bool canonical() const { return j1 > 0 || (j1 == 0 && j2 > 0); }

  ModeIndex operator+(const ModeIndex& o) const { return {j1 + o.j1, j2 + o.j2}; }
  ModeIndex operator-(const ModeIndex& o) const { return {j1 - o.j1, j2 - o.j2}; }
  ModeIndex operator-() const { return {-j1, -j2}; }
};

// j^perp = (-j2, j1); cross(j,k) = j^perp . k = j1 k2 - j2 k1.
inline long long cross(const ModeIndex& j, const ModeIndex& k) {
  return (long long)j.j1 * k.j2 - (long long)j.j2 * k.j1;
}

struct CanonicalMode {
  ModeIndex index;   // in Zplus2
  bool flipped;      // true if the input was -index
};

// Folds a nonzero pair onto Zplus2. Throws on the zero mode (mean-zero space).
inline CanonicalMode canonicalize(const ModeIndex& k) {
  if (k.is_zero()) throw std::invalid_argument("canonicalize: zero mode has no canonical form");
  if (k.canonical()) return {k, false};
  return {-k, true};
}

// Enumeration of all canonical modes with max-norm <= n_trunc, in a fixed
// documented order: j1 = 0 with j2 = 1..N first, then j1 = 1..N with
// j2 = -N..N. This order defines the BSQ1 file layout.
class Truncation {
 public:
  explicit Truncation(int n_trunc) : n_(n_trunc) {
    if (n_trunc < 1) throw std::invalid_argument("Truncation: n_trunc must be >= 1");
    modes_.reserve(2 * n_ * (n_ + 1));
    lookup_.assign((2 * n_ + 1) * (2 * n_ + 1), -1);
    for (int j2 = 1; j2 <= n_; ++j2) push({0, j2});
    for (int j1 = 1; j1 <= n_; ++j1)
      for (int j2 = -n_; j2 <= n_; ++j2) push({j1, j2});
  }

  int n_trunc() const { return n_; }
  int size() const { return (int)modes_.size(); }
  const std::vector<ModeIndex>& modes() const { return modes_; }
  const ModeIndex& mode(int i) const { return modes_[(size_t)i]; }

  bool contains(const ModeIndex& j) const {
    return j.canonical() && j.max_norm() <= n_;
  }

  // Index of a canonical mode, or -1 if outside the truncation.
  int find(const ModeIndex& j) const {
    if (!contains(j)) return -1;
    return lookup_[(size_t)((j.j1 + n_) * (2 * n_ + 1) + (j.j2 + n_))];
  }

  int index_of(const ModeIndex& j) const {
    int i = find(j);
    if (i < 0) throw std::out_of_range("Truncation: mode outside truncation");
    return i;
  }

 private:
  void push(ModeIndex j) {
    lookup_[(size_t)((j.j1 + n_) * (2 * n_ + 1) + (j.j2 + n_))] = (int)modes_.size();
    modes_.push_back(j);
  }

  int n_;
  std::vector<ModeIndex> modes_;
  std::vector<int> lookup_;
};

// Shared immutable truncation tables (modes are pure data, safe to share).
const Truncation& truncation(int n_trunc);

}  // namespace bsq
