// Replayable Wiener paths for the d = 2|Z| driving Brownian motions.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bsq {

// Deterministic 64-bit mixer, used to derive per-realization seeds.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Standard-normal generator with a fixed, platform-stable algorithm
// (xoshiro-free: splitmix64 stream + Box-Muller on 53-bit uniforms).
class Gaussian {
 public:
  explicit Gaussian(uint64_t seed) : s_(seed == 0 ? 0x9e3779b97f4a7c15ull : seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform() { return (double)(next() >> 11) * 0x1.0p-53; }
  uint64_t next() {
    s_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = s_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t s_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct NoisePath {
  double dt = 0.0;
  int d = 0;
  uint64_t seed = 0;
  // increments[step*d + k] ~ N(0, dt); replay of a seed is bit-exact.
  std::vector<double> increments;

  int n_steps() const { return d > 0 ? (int)(increments.size() / (size_t)d) : 0; }
  double horizon() const { return n_steps() * dt; }

  const double* step_increments(int i) const {
    if (i < 0 || i >= n_steps()) throw std::out_of_range("NoisePath: step out of range");
    return increments.data() + (size_t)i * d;
  }

  // Cumulative W(t_i) (i increments summed), one vector per grid node.
  std::vector<double> cumulative(int i) const {
    std::vector<double> w((size_t)d, 0.0);
    const int n = std::min(i, n_steps());
    for (int s = 0; s < n; ++s)
      for (int k = 0; k < d; ++k) w[(size_t)k] += increments[(size_t)s * d + k];
    return w;
  }
};

// Samples a fresh path of n_steps increments; deterministic in the seed.
NoisePath make_noise_path(uint64_t seed, double dt, int n_steps, int d);

// Seed of the idx-th realization derived from a master seed.
inline uint64_t realization_seed(uint64_t master, uint64_t idx) {
  return splitmix64(master ^ splitmix64(idx + 0x51ed2701u));
}

}  // namespace bsq
