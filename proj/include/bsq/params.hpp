// Physical parameters of the stochastic Boussinesq system (dimensionless).

#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bsq/modes.hpp"

namespace bsq {

// Key of one forced noise direction: canonical mode + parity (0 = cos, 1 = sin).
struct ForcedDirection {
  ModeIndex mode;
  int parity = 0;

  friend bool operator<(const ForcedDirection& a, const ForcedDirection& b) {
    if (a.mode.j1 != b.mode.j1) return a.mode.j1 < b.mode.j1;
    if (a.mode.j2 != b.mode.j2) return a.mode.j2 < b.mode.j2;
    return a.parity < b.parity;
  }
  friend bool operator==(const ForcedDirection& a, const ForcedDirection& b) {
    return a.mode == b.mode && a.parity == b.parity;
  }
};

struct PhysParams {
  double nu1 = 1.0;  // kinematic viscosity
  double nu2 = 1.0;  // thermal diffusivity
  double g = 1.0;    // buoyancy coefficient
  // Forced temperature directions with their (nonzero) amplitudes.
  std::map<ForcedDirection, double> alphas;

  PhysParams() { set_default_forcing(); }
  PhysParams(double nu1_, double nu2_, double g_) : nu1(nu1_), nu2(nu2_), g(g_) {
    set_default_forcing();
    validate();
  }

  // Z = {(1,0),(0,1)}, both parities, amplitude 1 (d = 4 noise directions).
  void set_default_forcing() {
    alphas.clear();
    for (int p : {0, 1}) {
      alphas[{{1, 0}, p}] = 1.0;
      alphas[{{0, 1}, p}] = 1.0;
    }
  }

  int noise_dim() const { return (int)alphas.size(); }

  // nu1*nu2/g^2, the weight on the vorticity component of the H-norm.
  double omega_weight() const { return nu1 * nu2 / (g * g); }

  double kappa() const { return std::min(nu1, nu2); }

  void validate() const {
    if (!(nu1 > 0.0)) throw std::invalid_argument("PhysParams: nu1 must be positive");
    if (!(nu2 > 0.0)) throw std::invalid_argument("PhysParams: nu2 must be positive");
    if (g == 0.0)
      throw std::invalid_argument(
          "PhysParams: g must be nonzero (buoyancy coupling is required to spread the "
          "degenerate temperature forcing; g = 0 breaks uniqueness of the invariant state)");
    for (const auto& [dir, a] : alphas) {
      if (a == 0.0) throw std::invalid_argument("PhysParams: forcing amplitudes must be nonzero");
      if (!dir.mode.canonical())
        throw std::invalid_argument("PhysParams: forced modes must be canonical (Zplus2)");
      if (dir.parity != 0 && dir.parity != 1)
        throw std::invalid_argument("PhysParams: parity must be 0 or 1");
    }
  }

  // Fixed iteration order of the d noise directions.
  std::vector<std::pair<ForcedDirection, double>> noise_directions() const {
    return {alphas.begin(), alphas.end()};
  }
};

}  // namespace bsq
