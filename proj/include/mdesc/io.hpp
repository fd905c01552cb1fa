#pragma once

#include "mdesc/cut.hpp"
#include "mdesc/embedding.hpp"
#include "mdesc/metric.hpp"
#include "mdesc/sdp.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mdesc {

/// {"n": int, "labels": [string]?, "d": [[real]]}; the loader validates,
/// always allowing a slack of 1e-12 times the largest entry so that rounded
/// sums (random l1 metrics) load back.
std::string metric_to_json(const MetricSpace& m);
MetricSpace metric_from_json(const std::string& text, const ValidationOptions& options = {});

/// {"n": int, "dim": int, "lip_bound": real, "coords": [[real]]}
std::string embedding_to_json(const Embedding& e);
Embedding embedding_from_json(const std::string& text);

/// {"n": int, "w_N": [[real]], "w_D": [[real]]}
std::string cut_instance_to_json(const CutInstance& instance);
CutInstance cut_instance_from_json(const std::string& text);

/// Debug dump: gram, status, iterations, residuals.
std::string sdp_solution_to_json(const SdpSolution& s);

/// Whole file as a string; throws IoError.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a truncated file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
std::string format_real(double x);

/// CSV text with the version comment line, a header row and data rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  /// Cells must match the column count; throws InvalidArgument otherwise.
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline constexpr const char* kCsvVersionLine = "# metric-descent v1";

}  // namespace mdesc
