#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smc/filters/filter.hpp"
#include "smc/graph.hpp"
#include "smc/rng.hpp"
#include "smc/runtime.hpp"

namespace smc {

enum class InnerFilter { bootstrap, auxiliary };

InnerFilter parse_inner_filter(std::string_view name);
std::string_view inner_filter_name(InnerFilter kind);

struct PmmhConfig {
  std::vector<std::string> targets;
  // Random-walk covariance on the (transformed) parameter scale. When empty,
  // proposal_scale^2 * I is used, which is the scalar sampler for a single
  // target.
  Eigen::MatrixXd proposal_cov;
  double proposal_scale = 1.0;
  bool adaptive = false;
  // Re-run the filter at the current parameters before each proposal.
  bool pf_resample = false;
  // Propose on log/logit scales; false proposes raw values.
  bool transform = true;
  InnerFilter inner = InnerFilter::bootstrap;
  FilterConfig filter;
  std::size_t iterations = 1000;
  std::size_t thin = 1;
  std::size_t burn_in = 0;

  void validate() const;
};

struct LikelihoodEstimate {
  double log_likelihood = 0.0;
  // One latent path drawn from the filter; empty when not requested.
  std::vector<double> trajectory;
};

// Must be deterministic given its arguments. DegenerateWeightsError is taken
// as a zero likelihood.
using LikelihoodEstimator = std::function<LikelihoodEstimate(const ModelState&, const Rng&)>;

// The particle filter named in `config`, with a trajectory drawn when
// config.filter.save_all is set.
LikelihoodEstimator particle_estimator(const ModelGraph& graph, std::string_view latent, const PmmhConfig& config);

struct PmmhChain {
  std::vector<std::string> names;
  std::vector<NodeId> nodes;
  std::vector<std::size_t> iteration;   // 1-based, one per retained row
  Eigen::MatrixXd theta;                // retained rows x targets
  std::vector<double> log_likelihood;
  std::vector<std::uint8_t> accepted;
  std::vector<std::vector<double>> trajectories;  // empty unless requested
  std::size_t acceptances = 0;          // over all iterations
  std::size_t degenerate_filters = 0;   // proposals rejected for degenerate weights
  Eigen::MatrixXd final_proposal_cov;

  double acceptance_rate(std::size_t iterations) const {
    return iterations == 0 ? 0.0 : static_cast<double>(acceptances) / static_cast<double>(iterations);
  }
};

// Starts from the target values in `state`.
PmmhChain pmmh_run(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                   const PmmhConfig& config, const Rng& rng);
PmmhChain pmmh_run(const ModelGraph& graph, const ModelState& state, const PmmhConfig& config,
                   const LikelihoodEstimator& estimator, const Rng& rng);

// Running mean and covariance of the chain for adaptive Metropolis.
class AdaptiveProposal {
 public:
  static constexpr std::size_t kWarmup = 100;
  static constexpr double kEpsilon = 1e-6;

  explicit AdaptiveProposal(Eigen::MatrixXd initial);

  void observe(const Eigen::VectorXd& z);
  // Proposal covariance for iteration i (1-based). Adapts while
  // kWarmup < i <= burn_in, or for every i > kWarmup when burn_in is 0.
  const Eigen::MatrixXd& covariance(std::size_t i, std::size_t burn_in);
  std::size_t count() const { return n_; }
  Eigen::MatrixXd sample_covariance() const;

 private:
  Eigen::MatrixXd current_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd m2_;
  std::size_t n_ = 0;
};

// (2.38^2 / d) (cov(history) + 1e-6 I) once i passes the warm-up, otherwise
// `initial`.
Eigen::MatrixXd adapt_proposal(const std::vector<Eigen::VectorXd>& history, std::size_t i,
                               const Eigen::MatrixXd& initial, std::size_t burn_in = 0);

}  // namespace smc
