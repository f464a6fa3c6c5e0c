#include "smc/cli/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "smc/error.hpp"

namespace smc::cli {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(where + ": '" + text + "' is not a number");
  return v;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::vector<double>> read_data_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<std::string> names;
  while (names.empty() && std::getline(in, line))
    if (!trim(line).empty()) names = split(line);
  if (names.empty()) throw ConfigError(path + ": missing header row");
  std::map<std::string, std::vector<double>> out;
  for (const auto& n : names) {
    if (n.empty()) throw ConfigError(path + ": empty column name");
    if (!out.emplace(n, std::vector<double>{}).second) throw ConfigError(path + ": duplicate column '" + n + "'");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != names.size())
      throw ConfigError(path + ":" + std::to_string(row) + ": expected " + std::to_string(names.size()) +
                        " cells, got " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string where = path + ":" + std::to_string(row) + " column '" + names[c] + "'";
      if (cells[c].empty() || cells[c] == "NA")
        throw ConfigError(where + ": missing values are not supported");
      out[names[c]].push_back(parse_number(cells[c], where));
    }
  }
  return out;
}

std::map<std::string, double> read_number_map(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": expected a JSON object of name -> number");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ConfigError(path + ": value of '" + k + "' is not a number");
    out[k] = v.get<double>();
  }
  return out;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    std::vector<double> r;
    for (const auto& cell : split(line)) r.push_back(parse_number(cell, path + ":" + std::to_string(row)));
    rows.push_back(std::move(r));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw ConfigError(path + ": empty matrix");
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw ConfigError(path + ": matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw ConfigError("cannot write '" + path + "': " + std::strerror(errno));
}

CsvWriter::~CsvWriter() {
  if (file_) std::fclose(file_);
}

void CsvWriter::sep() {
  if (!first_) std::fputc(',', file_);
  first_ = false;
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) cell(n);
  end_row();
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(std::size_t v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  sep();
  std::fputs(v.c_str(), file_);
  return *this;
}

void CsvWriter::end_row() {
  std::fputc('\n', file_);
  first_ = true;
}

void CsvWriter::close() {
  if (!file_) return;
  const bool bad = std::ferror(file_) != 0;
  const bool close_failed = std::fclose(file_) != 0;
  file_ = nullptr;
  if (bad || close_failed) throw ConfigError("error writing '" + path_ + "'");
}

}  // namespace smc::cli
