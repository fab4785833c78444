#include "bsq/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace bsq::fft {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

int pad_size(int n_trunc) {
  int need = 3 * n_trunc + 2;
  int best = -1;
  for (int a = 1; (1 << a) < 4 * need; ++a) {
    int p = 1 << a;
    for (int b = 0; p < 4 * need; ++b, p *= 3) {
      if (p >= need && (best < 0 || p < best)) best = p;
    }
  }
  return best;
}

Workspace::Workspace(int M) : M_(M) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real((size_t)M * M);
  auto* c = fftw_alloc_complex((size_t)M * (M / 2 + 1));
  cplx_ = c;
  plan_r2c_ = fftw_plan_dft_r2c_2d(M, M, real_, c, FFTW_ESTIMATE);
  plan_c2r_ = fftw_plan_dft_c2r_2d(M, M, c, real_, FFTW_ESTIMATE);
  if (!plan_r2c_ || !plan_c2r_) throw std::runtime_error("fftw plan creation failed");
}

Workspace::~Workspace() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan((fftw_plan)plan_r2c_);
  fftw_destroy_plan((fftw_plan)plan_c2r_);
  fftw_free(real_);
  fftw_free((fftw_complex*)cplx_);
}

void Workspace::synth(const Truncation& tr, const double* coeffs, int stride, int cos_slot,
                      int sin_slot, std::vector<double>& grid) {
  const int M = M_;
  const int H = M / 2 + 1;
  auto* c = (fftw_complex*)cplx_;
  std::memset(c, 0, sizeof(fftw_complex) * (size_t)M * H);

  const auto& modes = tr.modes();
  for (size_t m = 0; m < modes.size(); ++m) {
    const ModeIndex& j = modes[m];
    const double cc = coeffs[stride * m + cos_slot];
    const double ss = coeffs[stride * m + sin_slot];
    if (cc == 0.0 && ss == 0.0) continue;
    // f_hat(j) = (c - i s)/2 for the wavevector j; conjugate at -j.
    const double re = 0.5 * cc, im = -0.5 * ss;
    if (j.j2 > 0) {
      c[(size_t)j.j1 * H + j.j2][0] += re;
      c[(size_t)j.j1 * H + j.j2][1] += im;
    } else if (j.j2 < 0) {
      // store conj at (-j1, -j2): row index (M - j1) since j1 > 0 here
      c[(size_t)(M - j.j1) * H + (-j.j2)][0] += re;
      c[(size_t)(M - j.j1) * H + (-j.j2)][1] -= im;
    } else {  // j2 == 0, j1 > 0: fill both halves of the k2 = 0 column
      c[(size_t)j.j1 * H][0] += re;
      c[(size_t)j.j1 * H][1] += im;
      c[(size_t)(M - j.j1) * H][0] += re;
      c[(size_t)(M - j.j1) * H][1] -= im;
    }
  }
  fftw_execute_dft_c2r((fftw_plan)plan_c2r_, c, real_);
  grid.resize((size_t)M * M);
  std::memcpy(grid.data(), real_, sizeof(double) * (size_t)M * M);
}

void Workspace::analyze(const std::vector<double>& grid, const Truncation& tr, double* coeffs,
                        int stride, int cos_slot, int sin_slot) {
  const int M = M_;
  const int H = M / 2 + 1;
  if ((int)grid.size() != M * M) throw std::invalid_argument("analyze: grid size mismatch");
  std::memcpy(real_, grid.data(), sizeof(double) * (size_t)M * M);
  auto* c = (fftw_complex*)cplx_;
  fftw_execute_dft_r2c((fftw_plan)plan_r2c_, real_, c);

  const double inv = 1.0 / ((double)M * M);
  const auto& modes = tr.modes();
  for (size_t m = 0; m < modes.size(); ++m) {
    const ModeIndex& j = modes[m];
    double re, im;
    if (j.j2 > 0) {
      re = c[(size_t)j.j1 * H + j.j2][0];
      im = c[(size_t)j.j1 * H + j.j2][1];
    } else if (j.j2 < 0) {
      re = c[(size_t)(M - j.j1) * H + (-j.j2)][0];
      im = -c[(size_t)(M - j.j1) * H + (-j.j2)][1];
    } else {
      re = c[(size_t)j.j1 * H][0];
      im = c[(size_t)j.j1 * H][1];
    }
    coeffs[stride * m + cos_slot] = 2.0 * re * inv;
    coeffs[stride * m + sin_slot] = -2.0 * im * inv;
  }
}

Workspace& workspace(int M) {
  thread_local std::map<int, std::unique_ptr<Workspace>> cache;
  auto& slot = cache[M];
  if (!slot) slot = std::make_unique<Workspace>(M);
  return *slot;
}

}  // namespace bsq::fft
