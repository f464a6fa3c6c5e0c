#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smc/graph.hpp"
#include "smc/runtime.hpp"

namespace smc {

// x_1 ~ N(m0, P0)
// x_t = A x_{t-1} + c_t + N(0, Q_t),  t = 2..T
// y_t = H x_t + d_t + N(0, R_t)
// Index t - 1 of `transition_noise` and `transition_offset` is the step into
// time t + 1 (zero-based). Empty offset vectors mean zero offsets.
struct GaussianSSM {
  Eigen::MatrixXd A;
  Eigen::MatrixXd H;
  std::vector<Eigen::MatrixXd> Q;  // T - 1 entries
  std::vector<Eigen::MatrixXd> R;  // T entries
  Eigen::VectorXd m0;
  Eigen::MatrixXd P0;
  std::vector<Eigen::VectorXd> c;  // T - 1 entries or empty
  std::vector<Eigen::VectorXd> d;  // T entries or empty

  std::size_t time_points() const { return R.size(); }
};

struct KalmanStep {
  Eigen::VectorXd predicted_mean;
  Eigen::MatrixXd predicted_cov;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd gain;  // empty when y_t is missing
  double log_likelihood = 0.0;  // log p(y_t | y_1:t-1)
};

struct KalmanResult {
  std::vector<KalmanStep> steps;
  double log_likelihood = 0.0;
};

// An empty y[t] is treated as missing: no update, zero likelihood term.
KalmanResult kalman_filter(const GaussianSSM& ssm, const std::vector<Eigen::VectorXd>& y);

struct GaussianExtraction {
  std::optional<GaussianSSM> ssm;
  std::vector<Eigen::VectorXd> y;
  std::string mismatch;
  std::optional<NodeId> node;  // first offending node

  explicit operator bool() const { return ssm.has_value(); }
};

// Reads a linear-Gaussian model off the graph along one latent chain. Nodes
// outside the chain take their values from `state`. A normal initial node
// feeding x[1] (x0, say) is integrated into m0 and P0 unless it is listed in
// `held`.
GaussianExtraction extract_gaussian(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                                    std::span<const NodeId> held = {});

}  // namespace smc
