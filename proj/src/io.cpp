#include "mdesc/io.hpp"

#include "mdesc/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mdesc {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

json matrix_to_json(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* key, int rows, int cols) {
  const auto data = field<std::vector<std::vector<double>>>(j, key);
  if (static_cast<int>(data.size()) != rows)
    throw Error(ErrorKind::ParseError, std::string("field '") + key + "' has the wrong row count");
  Eigen::MatrixXd a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(data[i].size()) != cols)
      throw Error(ErrorKind::ParseError, std::string("field '") + key + "' has a ragged row");
    for (int k = 0; k < cols; ++k) a(i, k) = data[i][k];
  }
  return a;
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string metric_to_json(const MetricSpace& m) {
  json j;
  j["n"] = m.size();
  if (!m.labels().empty()) j["labels"] = m.labels();
  j["d"] = matrix_to_json(m.matrix());
  return j.dump() + "\n";
}

MetricSpace metric_from_json(const std::string& text, const ValidationOptions& options) {
  const json j = parse(text);
  const int n = field<int>(j, "n");
  if (n < 0) throw Error(ErrorKind::ParseError, "n must be nonnegative");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = field<std::vector<std::string>>(j, "labels");
  Eigen::MatrixXd d = matrix_from_json(j, "d", n, n);
  ValidationOptions relaxed = options;
  if (n > 0) relaxed.tol = std::max(options.tol, 1e-12 * d.cwiseAbs().maxCoeff());
  return validate_metric(std::move(d), std::move(labels), relaxed);
}

std::string embedding_to_json(const Embedding& e) {
  json j;
  j["n"] = e.size();
  j["dim"] = e.dim();
  j["lip_bound"] = e.lip_bound();
  j["coords"] = matrix_to_json(e.coords());
  return j.dump() + "\n";
}

Embedding embedding_from_json(const std::string& text) {
  const json j = parse(text);
  const int n = field<int>(j, "n");
  const int dim = field<int>(j, "dim");
  if (n < 0 || dim < 0) throw Error(ErrorKind::ParseError, "n and dim must be nonnegative");
  return {matrix_from_json(j, "coords", n, dim), field<double>(j, "lip_bound")};
}

std::string cut_instance_to_json(const CutInstance& instance) {
  json j;
  j["n"] = instance.n;
  j["w_N"] = matrix_to_json(instance.w_n);
  j["w_D"] = matrix_to_json(instance.w_d);
  return j.dump() + "\n";
}

CutInstance cut_instance_from_json(const std::string& text) {
  const json j = parse(text);
  const int n = field<int>(j, "n");
  if (n < 0) throw Error(ErrorKind::ParseError, "n must be nonnegative");
  return make_cut_instance(matrix_from_json(j, "w_N", n, n), matrix_from_json(j, "w_D", n, n));
}

std::string sdp_solution_to_json(const SdpSolution& s) {
  json j;
  j["status"] = to_string(s.status);
  j["iterations"] = s.iterations;
  j["objective_value"] = s.objective_value;
  j["dual_bound"] = s.dual_bound;
  j["scalar"] = s.scalar;
  j["max_violation"] = s.max_violation;
  j["min_eigenvalue"] = s.min_eigenvalue;
  j["gram"] = matrix_to_json(s.gram);
  return j.dump() + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::IoError, "cannot rename onto " + path.string());
  }
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw Error(ErrorKind::InvalidArgument, "CSV row does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out = std::string(kCsvVersionLine) + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

}  // namespace mdesc
