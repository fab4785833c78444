// BSQ1 binary trajectory format, little-endian.
//
// Layout: magic "BSQ1" | sentinel f64 (kSentinel) | n_trunc u32 | d u32 |
// step_count u64 | seed u64 | dt f64 | nu1 f64 | nu2 f64 | g f64 | snapshots.
// Each snapshot stores, per canonical mode in Truncation order:
// omega_cos, omega_sin, theta_cos, theta_sin as f64.

#pragma once

#include <string>

#include "bsq/integrator.hpp"

namespace bsq {

inline constexpr double kBsqSentinel = 1876.5;

struct TrajectoryIoError : std::runtime_error {
  explicit TrajectoryIoError(const std::string& what) : std::runtime_error(what) {}
};

void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

}  // namespace bsq
