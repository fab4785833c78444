// Padded-grid FFT workspace for dealiased pseudo-spectral products.
//
// Coefficients live on the canonical half-lattice (see modes.hpp); the grid
// is an M x M uniform sampling of the torus with M >= 3*n_trunc + 2, so
// quadratic products of truncated fields are alias-free on the retained modes
// (2/3-rule by zero padding).

#pragma once

#include <vector>

#include "bsq/modes.hpp"

namespace bsq::fft {

// Smallest even M = 2^a * 3^b with M >= 3*n + 2.
int pad_size(int n_trunc);

class Workspace {
 public:
  explicit Workspace(int M);
  ~Workspace();
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  int size() const { return M_; }

  // Evaluates sum_j c_j cos(j.x) + s_j sin(j.x) on the grid (row-major,
  // x = 2*pi*i/M). Coefficients are read at coeffs[stride*m + cos_slot] etc.
  void synth(const Truncation& tr, const double* coeffs, int stride, int cos_slot, int sin_slot,
             std::vector<double>& grid);

  // Inverse of synth restricted to modes of tr: writes cos/sin coefficients
  // of the grid function (exact for band-limited data within the pad bound).
  void analyze(const std::vector<double>& grid, const Truncation& tr, double* coeffs, int stride,
               int cos_slot, int sin_slot);

 private:
  int M_;
  double* real_;    // M x M
  void* cplx_;      // M x (M/2+1) fftw_complex
  void* plan_r2c_;
  void* plan_c2r_;
};

// Thread-local workspace cache keyed by grid size.
Workspace& workspace(int M);

}  // namespace bsq::fft
