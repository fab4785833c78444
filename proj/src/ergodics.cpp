#include "bsq/ergodics.hpp"

#include <algorithm>
#include <cmath>

#include "bsq/parallel.hpp"

namespace bsq {

double Observable::operator()(const SpectralState& u, const PhysParams& p) const {
  switch (kind) {
    case Kind::ModeCoefficient:
      return u.coeff(element.index, element.slot());
    case Kind::WeightedEnergy: {
      const double n = weighted_norm(u, p);
      return n * n;
    }
    case Kind::Enstrophy: {
      // vorticity L^2 norm squared by Parseval
      double s = 0.0;
      const auto& a = u.data();
      for (size_t i = 0; i < a.size(); i += 4)
        s += a[i + kOmegaCos] * a[i + kOmegaCos] + a[i + kOmegaSin] * a[i + kOmegaSin];
      return 2.0 * M_PI * M_PI * s;
    }
    case Kind::CustomQuadratic: {
      double s = 0.0;
      for (const auto& [b, w] : weights) {
        const double c = u.coeff(b.index, b.slot());
        s += w * c * c;
      }
      return s;
    }
  }
  return 0.0;
}

Observable Observable::mode_coefficient(const BasisElement& b) {
  Observable o;
  o.kind = Kind::ModeCoefficient;
  o.element = b;
  return o;
}

Observable Observable::weighted_energy() {
  Observable o;
  o.kind = Kind::WeightedEnergy;
  return o;
}

Observable Observable::enstrophy() {
  Observable o;
  o.kind = Kind::Enstrophy;
  return o;
}

double time_average(const Trajectory& traj, const Observable& phi, double burn_in) {
  const double T = traj.horizon();
  if (!(burn_in < T)) throw std::invalid_argument("time_average: burn_in must be below horizon");
  const int i0 = traj.grid_index(traj.t0 + burn_in, 0.5);  // snap to the grid
  const int n = traj.n_steps();
  double acc = 0.0;
  for (int i = i0; i <= n; ++i) {
    const double w = (i == i0 || i == n) ? 0.5 : 1.0;
    acc += w * phi(traj.state(i), traj.params);
  }
  return acc * traj.dt / ((n - i0) * traj.dt);
}

ExpMomentReport exp_moment_probe(const PhysParams& p, int n_trunc, double eta, double T,
                                 double dt, int samples, uint64_t seed, int workers) {
  if (!(eta > 0.0)) throw std::invalid_argument("exp_moment_probe: eta must be positive");
  const double kappa = p.kappa();
  ExpMomentReport rep;
  rep.samples = samples;
  const SpectralState u0(n_trunc);
  rep.bound = std::exp(eta * std::exp(-kappa * T / 2.0) * std::pow(weighted_norm(u0, p), 2));

  std::vector<double> vals((size_t)samples, 0.0);
  std::vector<char> over((size_t)samples, 0);
  const int n_steps = (int)std::llround(T / dt);
  parallel_for(samples, workers, [&](int r) {
    NoisePath path = make_noise_path(realization_seed(seed, (uint64_t)r), dt, n_steps,
                                     p.noise_dim());
    Trajectory traj = evolve(u0, p, T, path);
    double h1_int = 0.0;
    for (int i = 0; i <= n_steps; ++i) {
      const double w = (i == 0 || i == n_steps) ? 0.5 : 1.0;
      const double h1 = sobolev_norm(traj.state(i), p, 1.0);
      h1_int += w * dt * h1 * h1;
    }
    const double endn = weighted_norm(traj.state(n_steps), p);
    const double expo =
        eta * endn * endn + eta * (kappa / 4.0) * std::exp(-kappa * T / 4.0) * h1_int;
    if (expo > 700.0) {
      over[(size_t)r] = 1;
      return;
    }
    vals[(size_t)r] = std::exp(expo);
  });

  for (char o : over) rep.overflowed |= (o != 0);
  if (rep.overflowed) return rep;
  double full = 0.0, half = 0.0;
  for (int r = 0; r < samples; ++r) {
    full += vals[(size_t)r];
    if (r < samples / 2) half += vals[(size_t)r];
  }
  rep.estimate_full = full / samples;
  rep.estimate_half = half / std::max(1, samples / 2);
  rep.ratio = rep.estimate_full / rep.bound;
  return rep;
}

CouplingReport coupling_decay(const PhysParams& p, const SpectralState& u01,
                              const SpectralState& u02, double horizon, double dt, int samples,
                              uint64_t seed, int workers) {
  const int n_steps = (int)std::llround(horizon / dt);
  CouplingReport rep;
  rep.times.resize((size_t)n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) rep.times[(size_t)i] = i * dt;
  std::vector<std::vector<double>> logs((size_t)samples);
  parallel_for(samples, workers, [&](int r) {
    NoisePath path = make_noise_path(realization_seed(seed, (uint64_t)r), dt, n_steps,
                                     p.noise_dim());
    Trajectory t1 = evolve(u01, p, horizon, path);
    Trajectory t2 = evolve(u02, p, horizon, path);
    auto& l = logs[(size_t)r];
    l.resize((size_t)n_steps + 1);
    for (int i = 0; i <= n_steps; ++i) {
      const double d = weighted_norm(t1.state(i) - t2.state(i), p);
      l[(size_t)i] = std::log(std::max(d, 1e-300));
    }
  });
  rep.mean_log_diff.assign((size_t)n_steps + 1, 0.0);
  for (const auto& l : logs)
    for (size_t i = 0; i < l.size(); ++i) rep.mean_log_diff[i] += l[i] / samples;

  // least squares slope over the full window
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = n_steps + 1;
  for (int i = 0; i < n; ++i) {
    sx += rep.times[(size_t)i];
    sy += rep.mean_log_diff[(size_t)i];
    sxx += rep.times[(size_t)i] * rep.times[(size_t)i];
    sxy += rep.times[(size_t)i] * rep.mean_log_diff[(size_t)i];
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

CltReport clt_histogram(const PhysParams& p, int n_trunc, const Observable& phi, double T,
                        double dt, int samples, uint64_t seed, int workers) {
  const double burn = T / 10.0;
  const int n_steps = (int)std::llround(T / dt);
  std::vector<double> avgs((size_t)samples), ints((size_t)samples);
  const SpectralState u0(n_trunc);
  parallel_for(samples, workers, [&](int r) {
    NoisePath path = make_noise_path(realization_seed(seed, (uint64_t)r), dt, n_steps,
                                     p.noise_dim());
    Trajectory traj = evolve(u0, p, T, path);
    avgs[(size_t)r] = time_average(traj, phi, burn);
  });
  double mean = 0.0;
  for (double a : avgs) mean += a / samples;
  const double span = T - burn;
  for (int r = 0; r < samples; ++r)
    ints[(size_t)r] = (avgs[(size_t)r] - mean) * span / std::sqrt(span);

  CltReport rep;
  rep.samples = samples;
  double var = 0.0;
  for (double x : ints) var += x * x;
  rep.variance = var / (samples - 1.0);

  std::sort(ints.begin(), ints.end());
  const double sd = std::sqrt(rep.variance);
  double ks = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double z = ints[(size_t)i] / (sd > 0 ? sd : 1.0);
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / samples));
    ks = std::max(ks, std::abs(cdf - (double)i / samples));
  }
  rep.ks_distance = ks;
  rep.values = ints;
  return rep;
}

RhoDistance rho_r_distance(const SpectralState& u1, const SpectralState& u2, double r,
                           double varsigma, const PhysParams& p, int quad_points) {
  if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("rho_r_distance: r must be in (0,1]");
  if (!(varsigma > 0.0)) throw std::invalid_argument("rho_r_distance: varsigma must be positive");
  if (quad_points < 3 || quad_points % 2 == 0) quad_points |= 1, quad_points = std::max(3, quad_points);

  RhoDistance out;
  SpectralState diff = u2 - u1;
  const double dlen = weighted_norm(diff, p);
  out.lower = dlen;
  const double m = std::max(weighted_norm(u1, p), weighted_norm(u2, p));
  out.upper = std::exp(varsigma * r * m * m) * dlen;

  // composite Simpson over the straight-line path
  double acc = 0.0;
  const int n = quad_points;
  for (int i = 0; i < n; ++i) {
    const double s = (double)i / (n - 1);
    SpectralState g = u1;
    SpectralState d = diff;
    d *= s;
    g += d;
    const double gn = weighted_norm(g, p);
    const double f = std::exp(varsigma * r * gn * gn);
    const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  acc *= 1.0 / (3.0 * (n - 1));
  out.value = acc * dlen;
  return out;
}

MixingReport mixing_probe(const PhysParams& p, const Observable& phi,
                          const std::vector<SpectralState>& u0s, double horizon, double dt,
                          int samples, uint64_t seed, int workers) {
  if (u0s.size() < 2) throw std::invalid_argument("mixing_probe: need at least 2 initial states");
  const int n_steps = (int)std::llround(horizon / dt);
  const int n_ic = (int)u0s.size();

  std::vector<std::vector<double>> mean_phi((size_t)n_ic,
                                            std::vector<double>((size_t)n_steps + 1, 0.0));
  // per-realization slots, reduced deterministically afterwards; the noise
  // path depends only on the realization index, so every initial condition
  // sees the same paths (common random numbers)
  std::vector<std::vector<double>> slots((size_t)n_ic * samples);
  parallel_for(n_ic * samples, workers, [&](int idx) {
    const int ic = idx / samples;
    const int r = idx % samples;
    NoisePath path = make_noise_path(realization_seed(seed, (uint64_t)r), dt, n_steps,
                                     p.noise_dim());
    Trajectory traj = evolve(u0s[(size_t)ic], p, horizon, path);
    auto& s = slots[(size_t)idx];
    s.resize((size_t)n_steps + 1);
    for (int i = 0; i <= n_steps; ++i) s[(size_t)i] = phi(traj.state(i), p);
  });
  for (int ic = 0; ic < n_ic; ++ic)
    for (int r = 0; r < samples; ++r)
      for (int i = 0; i <= n_steps; ++i)
        mean_phi[(size_t)ic][(size_t)i] += slots[(size_t)(ic * samples + r)][(size_t)i] / samples;

  MixingReport rep;
  // pooled long-run mean over the last 20% of all curves
  const int i_tail = (int)(0.8 * n_steps);
  double pooled = 0.0;
  int count = 0;
  for (int ic = 0; ic < n_ic; ++ic)
    for (int i = i_tail; i <= n_steps; ++i) {
      pooled += mean_phi[(size_t)ic][(size_t)i];
      ++count;
    }
  rep.pooled_mean = pooled / count;

  for (int ic = 0; ic < n_ic; ++ic) {
    MixingCurve c;
    for (int i = 0; i <= n_steps; ++i) {
      c.times.push_back(i * dt);
      c.residual.push_back(std::abs(mean_phi[(size_t)ic][(size_t)i] - rep.pooled_mean));
    }
    // LSQ rate on log-residuals over the middle 80% of the window
    const int a = (int)(0.1 * n_steps), b = (int)(0.9 * n_steps);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = a; i <= b; ++i) {
      const double res = c.residual[(size_t)i];
      if (res <= 1e-300) continue;
      const double x = c.times[(size_t)i], y = std::log(res);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    c.fitted_rate = n > 1 ? -(n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    rep.curves.push_back(std::move(c));
  }
  return rep;
}

}  // namespace bsq
