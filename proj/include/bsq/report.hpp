// CSV report emission with a provenance stamp on every artifact.

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "bsq/config.hpp"

namespace bsq {

inline constexpr const char* kVersion = "0.1.0";

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const ExperimentConfig& cfg,
            const std::vector<std::string>& columns);
  ~CsvWriter();

  template <typename... Ts>
  void row(Ts... vals) {
    bool first = true;
    ((write_cell(vals, first), first = false), ...);
    os_ << "\n";
  }

  void flush() { os_.flush(); }

 private:
  void write_cell(double v, bool first);
  void write_cell(int v, bool first);
  void write_cell(long long v, bool first);
  void write_cell(uint64_t v, bool first);
  void write_cell(const std::string& v, bool first);
  void write_cell(const char* v, bool first);

  std::ofstream os_;
};

std::string provenance_line(const ExperimentConfig& cfg);
void write_run_manifest(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace bsq
