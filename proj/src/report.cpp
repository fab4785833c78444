#include "bsq/report.hpp"

#include <filesystem>
#include <iomanip>
#include <sstream>

namespace bsq {

std::string provenance_line(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << cfg.hash()
     << std::dec << " seed=" << cfg.seed << " version=" << kVersion;
  return os.str();
}

CsvWriter::CsvWriter(const std::string& path, const ExperimentConfig& cfg,
                     const std::vector<std::string>& columns) {
  const auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  os_.open(path);
  if (!os_) throw std::runtime_error("cannot open report file: " + path);
  os_ << provenance_line(cfg) << "\n";
  for (size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
  os_ << "\n";
  os_.precision(17);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::write_cell(double v, bool first) { os_ << (first ? "" : ",") << v; }
void CsvWriter::write_cell(int v, bool first) { os_ << (first ? "" : ",") << v; }
void CsvWriter::write_cell(long long v, bool first) { os_ << (first ? "" : ",") << v; }
void CsvWriter::write_cell(uint64_t v, bool first) { os_ << (first ? "" : ",") << v; }
void CsvWriter::write_cell(const std::string& v, bool first) { os_ << (first ? "" : ",") << v; }
void CsvWriter::write_cell(const char* v, bool first) { os_ << (first ? "" : ",") << v; }

void write_run_manifest(const ExperimentConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream os(std::filesystem::path(out_dir) / "run_manifest.txt");
  os << provenance_line(cfg) << "\n\n" << cfg.canonical_text();
}

}  // namespace bsq
