// bsq: experiment driver for the stochastic Boussinesq toolkit.
//
// Subcommands: simulate, brackets-verify, span, malliavin-probe,
// control-decay, ergodic-stats, cascade. Exit codes: 0 success,
// 1 validation failure, 2 numerical failure (blow-up), 3 check failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>

#include "bsq/brackets.hpp"
#include "bsq/ergodics.hpp"
#include "bsq/malliavin.hpp"
#include "bsq/parallel.hpp"
#include "bsq/report.hpp"
#include "bsq/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCheckFailed = 3;

bsq::ExperimentConfig load_cfg(const std::string& path, uint64_t seed_override,
                               const std::string& out_override) {
  bsq::ExperimentConfig cfg = path.empty() ? bsq::ExperimentConfig{} : bsq::load_config(path);
  if (const char* env = std::getenv("BSQ_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
  if (seed_override != 0) cfg.seed = seed_override;
  if (!out_override.empty()) cfg.out_dir = out_override;
  return cfg;
}

int run_simulate(const bsq::ExperimentConfig& cfg) {
  bsq::write_run_manifest(cfg, cfg.out_dir);
  for (int r = 0; r < cfg.realizations; ++r) {
    const uint64_t seed = bsq::realization_seed(cfg.seed, (uint64_t)r);
    const int n_steps = (int)std::llround(cfg.horizon / cfg.dt);
    bsq::NoisePath path = bsq::make_noise_path(seed, cfg.dt, n_steps, cfg.physics.noise_dim());
    bsq::SpectralState u0(cfg.n_trunc);
    bsq::Trajectory traj = bsq::evolve(u0, cfg.physics, cfg.horizon, path);
    const fs::path file = fs::path(cfg.out_dir) / ("trajectory_" + std::to_string(r) + ".bsq");
    bsq::save_trajectory(traj, file.string());
    std::cout << "wrote " << file.string() << " (" << traj.n_steps() << " steps)\n";
  }
  return kExitOk;
}

int run_brackets_verify(const bsq::ExperimentConfig& cfg) {
  bsq::write_run_manifest(cfg, cfg.out_dir);
  const int jmax = cfg.bracket_jmax;
  const int nt = std::max(cfg.n_trunc, 4 * jmax + 6);
  const auto& p = cfg.physics;

  bsq::CsvWriter csv((fs::path(cfg.out_dir) / "bracket_verification.csv").string(), cfg,
                     {"field", "j1", "j2", "m", "k1", "k2", "m2", "fd_error_h", "fd_error_h2",
                      "ratio"});

  bsq::Gaussian gen(bsq::splitmix64(cfg.seed ^ 0xb4acce7ull));
  bsq::SpectralState u(nt);
  const auto& tr = u.trunc();
  for (int i = 0; i < tr.size(); ++i)
    if (tr.mode(i).max_norm() <= 2)
      for (int s = 0; s < 4; ++s) u.at(i, (bsq::Slot)s) = 0.3 * gen();

  const double h = 1e-4;
  bool all_ok = true;
  auto check = [&](const std::string& name, const bsq::ModeIndex& j, int m,
                   const bsq::ModeIndex& k, int m2, const bsq::SpectralState& closed,
                   const bsq::VectorField& e1, const bsq::VectorField& e2) {
    bsq::SpectralState fd1 = bsq::bracket_fd(e1, e2, u, h);
    bsq::SpectralState fd2 = bsq::bracket_fd(e1, e2, u, h / 2.0);
    const double err1 = bsq::norm(fd1 - closed);
    const double err2 = bsq::norm(fd2 - closed);
    const double ratio = err2 > 1e-14 ? err1 / err2 : 4.0;
    csv.row(name, j.j1, j.j2, m, k.j1, k.j2, m2, err1, err2, ratio);
    if (!(ratio > 3.5 && ratio < 4.5) && err2 > 1e-11) all_ok = false;
  };

  const bsq::VectorField F = bsq::drift_field(p);
  for (int j1 = 0; j1 <= jmax; ++j1)
    for (int j2 = -jmax; j2 <= jmax; ++j2) {
      const bsq::ModeIndex j{j1, j2};
      if (!j.canonical() || j.norm2() > jmax * jmax) continue;
      for (int m = 0; m < 2; ++m) {
        const auto sig = bsq::basis_vector({bsq::Kind::Sigma, j, m}, nt);
        check("Y", j, m, {0, 0}, 0, bsq::field_Y(j, m, u, p), F,
              bsq::const_field(sig, "sigma"));
        check("Z", j, m, {0, 0}, 0, bsq::field_Z(j, m, u, p), F, bsq::Y_field(j, m, p, nt));
      }
    }
  std::cout << "bracket verification written to " << cfg.out_dir << "\n";
  return all_ok ? kExitOk : kExitCheckFailed;
}

int run_span(const bsq::ExperimentConfig& cfg) {
  bsq::write_run_manifest(cfg, cfg.out_dir);
  std::vector<bsq::ModeIndex> forced;
  for (const auto& [dir, a] : cfg.physics.alphas)
    if (dir.parity == 0) forced.push_back(dir.mode);
  bsq::SpanLedger ledger = bsq::generate_span(forced, cfg.span_n, cfg.span_depth_cap);

  json out;
  out["forced"] = json::array();
  for (const auto& f : ledger.forced) out["forced"].push_back({f.j1, f.j2});
  out["target_N"] = cfg.span_n;
  out["depth_reached"] = ledger.depth_reached;
  out["covered"] = ledger.covered;
  out["generated_sigma"] = json::array();
  for (size_t i = 0; i < ledger.sigma_modes.size(); ++i)
    out["generated_sigma"].push_back({{"mode", {ledger.sigma_modes[i].j1, ledger.sigma_modes[i].j2}},
                                      {"depth", ledger.sigma_depth[i]}});
  out["generated_psi"] = json::array();
  for (const auto& c : ledger.psi_modes)
    out["generated_psi"].push_back({{"mode", {c.index.j1, c.index.j2}}, {"branch", c.branch}});
  out["recipes"] = json::array();
  for (const auto& r : ledger.recipes)
    out["recipes"].push_back({{"target", {r.target.j1, r.target.j2}},
                              {"parity", r.parity},
                              {"from_j", {r.j.j1, r.j.j2}},
                              {"from_k", {r.k.j1, r.k.j2}},
                              {"sum", r.sum},
                              {"cross", r.cross},
                              {"ab_num", r.ab.num},
                              {"ab_den", r.ab.den}});
  out["uncovered_sigma"] = json::array();
  for (const auto& m : ledger.uncovered_sigma) out["uncovered_sigma"].push_back({m.j1, m.j2});
  out["uncovered_psi"] = json::array();
  for (const auto& m : ledger.uncovered_psi) out["uncovered_psi"].push_back({m.j1, m.j2});
  out["provenance"] = bsq::provenance_line(cfg);

  fs::create_directories(cfg.out_dir);
  const fs::path file = fs::path(cfg.out_dir) / "span_ledger.json";
  std::ofstream os(file);
  os << out.dump(2) << "\n";
  std::cout << (ledger.covered ? "covered" : "NOT covered") << " I_" << cfg.span_n << " at depth "
            << ledger.depth_reached << "; ledger at " << file.string() << "\n";
  return ledger.covered ? kExitOk : kExitCheckFailed;
}

int run_malliavin_probe(const bsq::ExperimentConfig& cfg) {
  bsq::write_run_manifest(cfg, cfg.out_dir);
  bsq::CsvWriter csv((fs::path(cfg.out_dir) / "spectral_probe.csv").string(), cfg,
                     {"realization", "s", "t", "alpha", "N", "cone_min", "min_eig", "trace"});
  const int n_steps = (int)std::llround(cfg.horizon / cfg.dt);
  std::vector<double> values((size_t)cfg.realizations);
  std::vector<double> mins((size_t)cfg.realizations), traces((size_t)cfg.realizations);
  bsq::parallel_for(cfg.realizations, cfg.workers, [&](int r) {
    bsq::NoisePath path = bsq::make_noise_path(bsq::realization_seed(cfg.seed, (uint64_t)r),
                                               cfg.dt, n_steps, cfg.physics.noise_dim());
    bsq::SpectralState u0(cfg.n_trunc);
    bsq::Trajectory traj = bsq::evolve(u0, cfg.physics, cfg.horizon, path);
    bsq::GramMatrix m = bsq::assemble_M(traj, 0, n_steps);
    auto res = bsq::cone_min(m, {cfg.cone_alpha, cfg.cone_n});
    values[(size_t)r] = res.value;
    mins[(size_t)r] = res.min_eigenvalue;
    traces[(size_t)r] = m.trace();
  });
  for (int r = 0; r < cfg.realizations; ++r)
    csv.row(r, 0.0, cfg.horizon, cfg.cone_alpha, cfg.cone_n, values[(size_t)r], mins[(size_t)r],
            traces[(size_t)r]);
  int positive = 0;
  for (double v : values) positive += v > 0.0;
  std::cout << "cone_min > 0 on " << positive << "/" << cfg.realizations << " realizations\n";
  return positive == cfg.realizations ? kExitOk : kExitCheckFailed;
}

int run_control_decay(const bsq::ExperimentConfig& cfg) {
  bsq::write_run_manifest(cfg, cfg.out_dir);
  const int stages = 10;
  auto rep = bsq::control_decay_experiment(cfg.physics, cfg.n_trunc, cfg.dt, cfg.beta, stages,
                                           cfg.realizations, cfg.seed, cfg.workers);
  bsq::CsvWriter csv((fs::path(cfg.out_dir) / "control_decay.csv").string(), cfg,
                     {"stage", "moment8"});
  for (size_t i = 0; i < rep.stage_moment.size(); ++i) csv.row((int)(2 * i), rep.stage_moment[i]);
  bsq::CsvWriter sum((fs::path(cfg.out_dir) / "control_decay_summary.csv").string(), cfg,
                     {"contraction", "ci_low", "ci_high", "samples"});
  sum.row(rep.contraction, rep.ci_low, rep.ci_high, rep.samples);
  std::cout << "per-stage contraction " << rep.contraction << " (95% CI [" << rep.ci_low << ", "
            << rep.ci_high << "])\n";
  return kExitOk;
}

int run_ergodic_stats(const bsq::ExperimentConfig& cfg) {
  bsq::write_run_manifest(cfg, cfg.out_dir);
  const auto phi =
      bsq::Observable::mode_coefficient({bsq::Kind::Sigma, {1, 0}, 0});
  bsq::CsvWriter csv((fs::path(cfg.out_dir) / "ergodic_stats.csv").string(), cfg,
                     {"quantity", "horizon", "value"});

  // LLN horizon doubling
  const int n_steps = (int)std::llround(cfg.horizon / cfg.dt);
  for (int k = 0; k < 3; ++k) {
    const double T = cfg.horizon * (1 << k);
    double acc = 0.0;
    for (int r = 0; r < cfg.realizations; ++r) {
      bsq::NoisePath path = bsq::make_noise_path(bsq::realization_seed(cfg.seed, (uint64_t)r),
                                                 cfg.dt, n_steps * (1 << k),
                                                 cfg.physics.noise_dim());
      bsq::SpectralState u0(cfg.n_trunc);
      bsq::Trajectory traj = bsq::evolve(u0, cfg.physics, T, path);
      acc += bsq::time_average(traj, phi, T / 10.0);
    }
    csv.row("time_average", T, acc / cfg.realizations);
  }

  // CLT variance and KS distance
  auto clt = bsq::clt_histogram(cfg.physics, cfg.n_trunc, phi, cfg.horizon, cfg.dt,
                                cfg.realizations, cfg.seed ^ 0xc17, cfg.workers);
  csv.row("clt_variance", cfg.horizon, clt.variance);
  csv.row("clt_ks", cfg.horizon, clt.ks_distance);
  std::cout << "ergodic stats written to " << cfg.out_dir << "\n";
  return kExitOk;
}

int run_cascade(const bsq::ExperimentConfig& cfg) {
  bsq::write_run_manifest(cfg, cfg.out_dir);
  const int n_steps = (int)std::llround(cfg.horizon / cfg.dt);
  bsq::NoisePath path =
      bsq::make_noise_path(cfg.seed, cfg.dt, n_steps, cfg.physics.noise_dim());
  bsq::SpectralState u0(cfg.n_trunc);
  bsq::Trajectory traj = bsq::evolve(u0, cfg.physics, cfg.horizon, path);

  bsq::Gaussian gen(bsq::splitmix64(cfg.seed ^ 0xca5cadeull));
  bsq::SpectralState phi(cfg.n_trunc);
  for (double& x : phi.data()) x = gen();
  phi *= 1.0 / bsq::weighted_norm(phi, cfg.physics);

  std::vector<bsq::ChainElement> chain;
  chain.push_back({bsq::ChainElement::Type::Sigma, {1, 0}, 0, {0, 0}, 0});
  chain.push_back({bsq::ChainElement::Type::Y, {1, 0}, 0, {0, 0}, 0});
  chain.push_back({bsq::ChainElement::Type::Z, {1, 0}, 0, {0, 0}, 0});
  chain.push_back({bsq::ChainElement::Type::ZSigma, {1, 0}, 0, {0, 1}, 0});
  chain.push_back({bsq::ChainElement::Type::ZY, {1, 1}, 0, {1, 0}, 0});

  auto rep = bsq::cascade_probe(traj, path, phi, chain, 2 * cfg.n_trunc + 2);
  bsq::CsvWriter csv((fs::path(cfg.out_dir) / "cascade.csv").string(), cfg,
                     {"element", "sup_g", "sup_dg", "max_fd_residual"});
  for (const auto& s : rep.series) csv.row(s.element.label(), s.sup_g, s.sup_dg, s.max_fd_residual);
  std::cout << "cascade report written to " << cfg.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral simulator and verification toolkit for the stochastic "
               "Boussinesq equations with degenerate temperature forcing"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  uint64_t seed = 0;
  app.add_option("--config", config_path, "experiment configuration file");
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--out", out_dir, "override the output directory");

  auto* sim = app.add_subcommand("simulate", "integrate trajectories and write BSQ1 files");
  auto* brk = app.add_subcommand("brackets-verify", "finite-difference bracket verification");
  auto* span = app.add_subcommand("span", "bracket span generation ledger");
  auto* mal = app.add_subcommand("malliavin-probe", "cone-restricted spectral probe CSV");
  auto* ctl = app.add_subcommand("control-decay", "iterative control decay experiment");
  auto* erg = app.add_subcommand("ergodic-stats", "LLN/CLT ergodic diagnostics");
  auto* casc = app.add_subcommand("cascade", "bracket cascade time-series probe");

  CLI11_PARSE(app, argc, argv);

  try {
    const bsq::ExperimentConfig cfg = load_cfg(config_path, seed, out_dir);
    if (sim->parsed()) return run_simulate(cfg);
    if (brk->parsed()) return run_brackets_verify(cfg);
    if (span->parsed()) return run_span(cfg);
    if (mal->parsed()) return run_malliavin_probe(cfg);
    if (ctl->parsed()) return run_control_decay(cfg);
    if (erg->parsed()) return run_ergodic_stats(cfg);
    if (casc->parsed()) return run_cascade(cfg);
  } catch (const bsq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const bsq::BlowUpError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
