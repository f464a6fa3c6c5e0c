#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smc/filters/filter.hpp"
#include "smc/pmmh.hpp"

namespace smc::cli {

// Everything needed to reproduce a run. Thread count is an execution detail
// and deliberately not part of the manifest, since it never changes results.
struct RunOptions {
  std::string command = "run";  // run or pmmh
  std::string model;
  std::string data;
  std::string constants;
  std::string inits;
  std::string latent;
  std::uint64_t seed = 1;

  // run
  std::string algorithm = "bootstrap";
  FilterConfig filter;
  bool dump_samples = false;
  std::size_t bins = 50;

  // pmmh
  std::vector<std::string> targets;
  std::string inner = "bootstrap";
  std::size_t iterations = 1000;
  std::size_t thin = 1;
  std::size_t burn_in = 0;
  std::string prop_cov_path;
  Eigen::MatrixXd prop_cov;
  double prop_scale = 1.0;
  bool adaptive = false;
  bool pf_resample = false;
  bool trajectories = false;

  std::size_t threads = 1;

  bool operator==(const RunOptions& other) const;
};

inline constexpr const char* kToolVersion = "0.1.0";

std::string manifest_json(const RunOptions& options);
RunOptions options_from_manifest(const std::string& json_text);

// Runs a filter or PMMH job and writes its outputs into `out_dir`.
void execute(const RunOptions& options, const std::string& out_dir, std::ostream& log);

// Simulates every unobserved node and writes the named variables as a data
// CSV (and optionally the latent path).
struct SimulateOptions {
  std::string model;
  std::string constants;
  std::string inits;
  std::vector<std::string> observe;
  std::string latent;
  std::string truth;
  std::string out;
  std::uint64_t seed = 1;
};
void simulate_data(const SimulateOptions& options, std::ostream& log);

// Entry point for the command-line tool. Returns 0 on success, 2 for
// configuration errors and 3 for numerical failures.
int run_cli(int argc, char** argv);

}  // namespace smc::cli
