// Strict experiment configuration: sectioned key = value text, unknown and
// duplicate keys rejected, all violations reported at once.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsq/params.hpp"

namespace bsq {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what, std::vector<std::string> violations = {})
      : std::runtime_error(what), violations(std::move(violations)) {}
  std::vector<std::string> violations;
};

struct ExperimentConfig {
  // [physics]
  PhysParams physics;
  // [truncation]
  int n_trunc = 16;
  int n_tilde = 8;       // headroom target for bracket probes
  // [integration]
  double dt = 1e-3;
  double horizon = 1.0;
  // [noise]
  uint64_t seed = 1;
  int realizations = 1;
  int workers = 0;       // 0 = hardware default
  // [probe]
  double cone_alpha = 0.5;
  int cone_n = 1;
  double beta = 1e-3;
  double eta = 0.05;
  double varsigma = 0.1;
  int span_n = 3;
  int span_depth_cap = 16;
  int bracket_jmax = 2;
  // [output]
  std::string out_dir = "out";

  std::string canonical_text() const;  // normalized key=value dump
  uint64_t hash() const;               // FNV-1a of the canonical text
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace bsq
