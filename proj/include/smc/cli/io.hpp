#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smc::cli {

std::string read_text(const std::string& path);

// Header row of variable names; row t holds time t. Empty cells are rejected.
std::map<std::string, std::vector<double>> read_data_csv(const std::string& path);

// Flat JSON object of name -> number.
std::map<std::string, double> read_number_map(const std::string& path);

// Square matrix from a headerless CSV file.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// 17 significant digits, so values round-trip; NaN is written as NA.
std::string format_number(double v);

// Buffered CSV file writer; throws ConfigError when the file cannot be
// opened or written.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  CsvWriter& header(const std::vector<std::string>& names);
  CsvWriter& cell(double v);
  CsvWriter& cell(std::size_t v);
  CsvWriter& cell(const std::string& v);
  void end_row();
  void close();

 private:
  void sep();
  std::FILE* file_ = nullptr;
  std::string path_;
  bool first_ = true;
};

}  // namespace smc::cli
