#include "bsq/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace bsq {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct Parser {
  std::vector<std::string> violations;

  bool parse_double(const std::string& v, double& out) {
    try {
      size_t pos = 0;
      out = std::stod(v, &pos);
      return pos == v.size();
    } catch (...) {
      return false;
    }
  }
  bool parse_int(const std::string& v, long long& out) {
    const char* b = v.data();
    const char* e = b + v.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
  }
};

// forced mode list: "j1,j2 ; j1,j2 ; ..."
bool parse_forced(const std::string& v, std::vector<ModeIndex>& out) {
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) return false;
    try {
      ModeIndex j{std::stoi(trim(item.substr(0, comma))), std::stoi(trim(item.substr(comma + 1)))};
      out.push_back(j);
    } catch (...) {
      return false;
    }
  }
  return !out.empty();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  Parser p;
  std::set<std::string> seen;
  std::string section;
  std::vector<ModeIndex> forced;
  double alpha_amplitude = 1.0;
  bool have_forced = false;

  std::stringstream ss(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(ss, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        p.violations.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.violations.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      p.violations.push_back("duplicate key: " + key);
      continue;
    }

    auto want_double = [&](double& slot) {
      double d;
      if (p.parse_double(value, d))
        slot = d;
      else
        p.violations.push_back("key " + key + ": not a number: '" + value + "'");
    };
    auto want_int = [&](auto& slot, long long lo, long long hi) {
      long long d;
      if (p.parse_int(value, d) && d >= lo && d <= hi)
        slot = (std::remove_reference_t<decltype(slot)>)d;
      else
        p.violations.push_back("key " + key + ": not an integer in [" + std::to_string(lo) + "," +
                               std::to_string(hi) + "]: '" + value + "'");
    };

    if (key == "physics.nu1") want_double(cfg.physics.nu1);
    else if (key == "physics.nu2") want_double(cfg.physics.nu2);
    else if (key == "physics.g") want_double(cfg.physics.g);
    else if (key == "physics.forced") {
      if (!parse_forced(value, forced))
        p.violations.push_back("key physics.forced: malformed mode list '" + value + "'");
      else
        have_forced = true;
    } else if (key == "physics.alpha") {
      want_double(alpha_amplitude);
    } else if (key == "truncation.n_trunc") want_int(cfg.n_trunc, 1, 256);
    else if (key == "truncation.n_tilde") want_int(cfg.n_tilde, 1, 256);
    else if (key == "integration.dt") want_double(cfg.dt);
    else if (key == "integration.horizon") want_double(cfg.horizon);
    else if (key == "noise.seed") {
      long long d;
      if (p.parse_int(value, d) && d >= 0)
        cfg.seed = (uint64_t)d;
      else
        p.violations.push_back("key noise.seed: not a nonnegative integer: '" + value + "'");
    } else if (key == "noise.realizations") want_int(cfg.realizations, 1, 1000000);
    else if (key == "noise.workers") want_int(cfg.workers, 0, 4096);
    else if (key == "probe.cone_alpha") want_double(cfg.cone_alpha);
    else if (key == "probe.cone_n") want_int(cfg.cone_n, 1, 256);
    else if (key == "probe.beta") want_double(cfg.beta);
    else if (key == "probe.eta") want_double(cfg.eta);
    else if (key == "probe.varsigma") want_double(cfg.varsigma);
    else if (key == "probe.span_n") want_int(cfg.span_n, 1, 64);
    else if (key == "probe.span_depth_cap") want_int(cfg.span_depth_cap, 1, 1024);
    else if (key == "probe.bracket_jmax") want_int(cfg.bracket_jmax, 1, 8);
    else if (key == "output.dir") cfg.out_dir = value;
    else p.violations.push_back("unknown key: " + key);
  }

  if (have_forced) {
    cfg.physics.alphas.clear();
    for (const auto& j : forced) {
      if (!j.canonical()) {
        p.violations.push_back("physics.forced: mode (" + std::to_string(j.j1) + "," +
                               std::to_string(j.j2) + ") is not canonical");
        continue;
      }
      for (int par : {0, 1}) cfg.physics.alphas[{j, par}] = alpha_amplitude;
    }
  } else if (alpha_amplitude != 1.0) {
    for (auto& [dir, a] : cfg.physics.alphas) a = alpha_amplitude;
  }

  // physical constraints, reported together with any syntax violations
  if (!(cfg.physics.nu1 > 0.0)) p.violations.push_back("physics.nu1 must be positive");
  if (!(cfg.physics.nu2 > 0.0)) p.violations.push_back("physics.nu2 must be positive");
  if (cfg.physics.g == 0.0)
    p.violations.push_back(
        "physics.g must be nonzero: buoyancy is the only coupling that spreads the degenerate "
        "temperature forcing, and g = 0 loses uniqueness of the invariant state");
  for (const auto& [dir, a] : cfg.physics.alphas)
    if (a == 0.0) p.violations.push_back("physics.alpha must be nonzero");
  if (!(cfg.dt > 0.0)) p.violations.push_back("integration.dt must be positive");
  if (!(cfg.horizon >= 0.0)) p.violations.push_back("integration.horizon must be nonnegative");
  if (!(cfg.cone_alpha > 0.0 && cfg.cone_alpha <= 1.0))
    p.violations.push_back("probe.cone_alpha must lie in (0,1]");
  if (!(cfg.beta > 0.0)) p.violations.push_back("probe.beta must be positive");
  if (cfg.n_tilde > cfg.n_trunc)
    p.violations.push_back("truncation.n_tilde must not exceed truncation.n_trunc");

  if (!p.violations.empty()) {
    std::string msg = "invalid configuration (" + std::to_string(p.violations.size()) + " problems)";
    for (const auto& v : p.violations) msg += "\n  - " + v;
    throw ConfigError(msg, p.violations);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "[physics]\nnu1 = " << physics.nu1 << "\nnu2 = " << physics.nu2 << "\ng = " << physics.g
     << "\n";
  os << "forced =";
  bool first = true;
  double amp = 1.0;
  for (const auto& [dir, a] : physics.alphas) {
    if (dir.parity == 0) {
      os << (first ? " " : " ; ") << dir.mode.j1 << "," << dir.mode.j2;
      first = false;
    }
    amp = a;
  }
  os << "\nalpha = " << amp << "\n";
  os << "[truncation]\nn_trunc = " << n_trunc << "\nn_tilde = " << n_tilde << "\n";
  os << "[integration]\ndt = " << dt << "\nhorizon = " << horizon << "\n";
  os << "[noise]\nseed = " << seed << "\nrealizations = " << realizations
     << "\nworkers = " << workers << "\n";
  os << "[probe]\ncone_alpha = " << cone_alpha << "\ncone_n = " << cone_n << "\nbeta = " << beta
     << "\neta = " << eta << "\nvarsigma = " << varsigma << "\nspan_n = " << span_n
     << "\nspan_depth_cap = " << span_depth_cap << "\nbracket_jmax = " << bracket_jmax << "\n";
  os << "[output]\ndir = " << out_dir << "\n";
  return os.str();
}

uint64_t ExperimentConfig::hash() const {
  const std::string text = canonical_text();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace bsq
