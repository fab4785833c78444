#include "bsq/trajectory_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace bsq {

namespace {

static_assert(std::endian::native == std::endian::little,
              "BSQ1 writer assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw TrajectoryIoError(std::string("truncated file while reading ") + what);
  return v;
}

}  // namespace

void save_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw TrajectoryIoError("cannot open for writing: " + path);
  os.write("BSQ1", 4);
  put<double>(os, kBsqSentinel);
  put<uint32_t>(os, (uint32_t)traj.n_trunc());
  put<uint32_t>(os, (uint32_t)traj.params.noise_dim());
  put<uint64_t>(os, (uint64_t)traj.n_steps());
  put<uint64_t>(os, traj.noise_seed);
  put<double>(os, traj.dt);
  put<double>(os, traj.params.nu1);
  put<double>(os, traj.params.nu2);
  put<double>(os, traj.params.g);
  for (const auto& s : traj.states)
    os.write(reinterpret_cast<const char*>(s.data().data()),
             (std::streamsize)(s.data().size() * sizeof(double)));
  if (!os) throw TrajectoryIoError("write failure: " + path);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TrajectoryIoError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "BSQ1", 4) != 0)
    throw TrajectoryIoError("magic mismatch: not a BSQ1 trajectory file");
  const double sentinel = get<double>(is, "sentinel");
  if (sentinel != kBsqSentinel)
    throw TrajectoryIoError("sentinel mismatch: file not written little-endian");
  const uint32_t n_trunc = get<uint32_t>(is, "n_trunc");
  const uint32_t d = get<uint32_t>(is, "d");
  const uint64_t n_steps = get<uint64_t>(is, "step count");
  const uint64_t seed = get<uint64_t>(is, "seed");
  const double dt = get<double>(is, "dt");
  const double nu1 = get<double>(is, "nu1");
  const double nu2 = get<double>(is, "nu2");
  const double g = get<double>(is, "g");
  if (n_trunc < 1 || n_trunc > 4096) throw TrajectoryIoError("header: implausible n_trunc");
  if (!(dt > 0.0)) throw TrajectoryIoError("header: dt must be positive");

  Trajectory traj;
  traj.dt = dt;
  traj.noise_seed = seed;
  traj.params = PhysParams(nu1, nu2, g);
  if (traj.params.noise_dim() != (int)d) {
    // amplitudes are not stored in the format; keep default directions only
    // when the dimension matches, otherwise reject as inconsistent
    throw TrajectoryIoError("header: noise dimension does not match default forcing set");
  }
  traj.states.reserve(n_steps + 1);
  const size_t per_state = (size_t)4 * truncation((int)n_trunc).size();
  for (uint64_t i = 0; i <= n_steps; ++i) {
    SpectralState s((int)n_trunc);
    is.read(reinterpret_cast<char*>(s.data().data()),
            (std::streamsize)(per_state * sizeof(double)));
    if (!is) throw TrajectoryIoError("payload shorter than header step count");
    traj.states.push_back(std::move(s));
  }
  is.peek();
  if (!is.eof()) throw TrajectoryIoError("payload longer than header step count");
  return traj;
}

}  // namespace bsq
