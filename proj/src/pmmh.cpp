#include "smc/pmmh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smc/error.hpp"
#include "smc/filters.hpp"
#include "smc/filters/transforms.hpp"

namespace smc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& cov, const char* what) {
  if (cov.rows() != cov.cols()) throw ConfigError(std::string(what) + " must be square");
  if (!cov.isApprox(cov.transpose(), 1e-12)) throw ConfigError(std::string(what) + " must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw ConfigError(std::string(what) + " must be positive definite");
  return llt.matrixL();
}

std::vector<NodeId> resolve_targets(const ModelGraph& graph, const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("PMMH needs at least one target node");
  std::vector<NodeId> out;
  for (const auto& name : names) {
    std::vector<NodeId> ids;
    if (auto id = graph.find(name)) {
      ids.push_back(*id);
    } else if (graph.has_variable(name)) {
      ids = graph.variable_nodes(name);
    } else {
      throw LookupError("unknown target node '" + name + "'");
    }
    for (NodeId id : ids) {
      const Node& n = graph.node(id);
      if (n.role != NodeRole::parameter)
        throw ConfigError("'" + n.name + "' is " + std::string(role_name(n.role)) +
                          "; PMMH targets must be unobserved top-level stochastic nodes");
      if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
  }
  return out;
}

}  // namespace

InnerFilter parse_inner_filter(std::string_view name) {
  if (name == "bootstrap") return InnerFilter::bootstrap;
  if (name == "auxiliary") return InnerFilter::auxiliary;
  throw ConfigError("unknown inner filter '" + std::string(name) + "' (expected bootstrap or auxiliary)");
}

std::string_view inner_filter_name(InnerFilter kind) {
  return kind == InnerFilter::bootstrap ? "bootstrap" : "auxiliary";
}

void PmmhConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (proposal_cov.size() == 0 && !(proposal_scale > 0.0 && std::isfinite(proposal_scale)))
    throw ConfigError("proposal scale must be positive");
  filter.validate();
}

LikelihoodEstimator particle_estimator(const ModelGraph& graph, std::string_view latent, const PmmhConfig& config) {
  FilterConfig filter = config.filter;
  for (const auto& name : config.targets) filter.held.push_back(graph.at(name));
  return [&graph, latent = std::string(latent), filter, inner = config.inner](
             const ModelState& state, const Rng& rng) {
    const FilterResult r = inner == InnerFilter::bootstrap ? bootstrap_filter(graph, state, latent, filter, rng)
                                                           : auxiliary_filter(graph, state, latent, filter, rng);
    LikelihoodEstimate est{*r.log_likelihood, {}};
    if (filter.save_all) {
      Rng tr = rng.derive({stream::kTrajectory});
      est.trajectory = sample_trajectory(r, tr);
    }
    return est;
  };
}

AdaptiveProposal::AdaptiveProposal(Eigen::MatrixXd initial)
    : current_(std::move(initial)),
      mean_(Eigen::VectorXd::Zero(current_.rows())),
      m2_(Eigen::MatrixXd::Zero(current_.rows(), current_.rows())) {}

void AdaptiveProposal::observe(const Eigen::VectorXd& z) {
  ++n_;
  const Eigen::VectorXd delta = z - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (z - mean_).transpose();
}

Eigen::MatrixXd AdaptiveProposal::sample_covariance() const {
  if (n_ < 2) return Eigen::MatrixXd::Zero(m2_.rows(), m2_.cols());
  return m2_ / static_cast<double>(n_ - 1);
}

const Eigen::MatrixXd& AdaptiveProposal::covariance(std::size_t i, std::size_t burn_in) {
  const bool adapting = i > kWarmup && (burn_in == 0 || i <= burn_in);
  if (adapting) {
    const auto d = static_cast<double>(current_.rows());
    const Eigen::MatrixXd cov = 0.5 * (sample_covariance() + sample_covariance().transpose());
    current_ = (2.38 * 2.38 / d) * (cov + kEpsilon * Eigen::MatrixXd::Identity(current_.rows(), current_.cols()));
  }
  return current_;
}

Eigen::MatrixXd adapt_proposal(const std::vector<Eigen::VectorXd>& history, std::size_t i,
                               const Eigen::MatrixXd& initial, std::size_t burn_in) {
  AdaptiveProposal a(initial);
  for (const auto& z : history) a.observe(z);
  return a.covariance(i, burn_in);
}

PmmhChain pmmh_run(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                   const PmmhConfig& config, const Rng& rng) {
  return pmmh_run(graph, state, config, particle_estimator(graph, latent, config), rng);
}

PmmhChain pmmh_run(const ModelGraph& graph, const ModelState& state, const PmmhConfig& config,
                   const LikelihoodEstimator& estimator, const Rng& rng) {
  config.validate();
  const std::vector<NodeId> targets = resolve_targets(graph, config.targets);
  const std::size_t P = targets.size();

  std::vector<ParamTransform> transforms;
  for (NodeId id : targets) {
    if (std::isnan(state[id])) throw ConfigError("target '" + graph.node(id).name + "' has no starting value");
    transforms.push_back(ParamTransform::for_node(graph, state, id, config.transform));
  }

  // Prior: the targets, deterministic nodes downstream of them, and any
  // stochastic non-latent dependents whose density changes with them. Initial
  // nodes of the latent chain are drawn inside the filter instead.
  std::vector<NodeId> prior_nodes(targets);
  for (NodeId d : graph.dependencies(targets, DependencyFilter::all)) {
    const Node& n = graph.node(d);
    if (std::find(targets.begin(), targets.end(), d) != targets.end()) continue;
    if (n.stochastic) {
      if (n.role != NodeRole::parameter) continue;
      bool feeds_latent_only = false;
      for (NodeId c : graph.dependencies(d, DependencyFilter::all)) {
        if (!graph.node(c).stochastic) continue;
        if (graph.node(c).role != NodeRole::latent) {
          feeds_latent_only = false;
          break;
        }
        feeds_latent_only = true;
      }
      if (feeds_latent_only) continue;
    }
    prior_nodes.push_back(d);
  }
  std::sort(prior_nodes.begin(), prior_nodes.end(),
            [&](NodeId a, NodeId b) { return graph.node(a).topo_rank < graph.node(b).topo_rank; });

  Eigen::MatrixXd sigma = config.proposal_cov.size() > 0
                              ? config.proposal_cov
                              : Eigen::MatrixXd(config.proposal_scale * config.proposal_scale *
                                                Eigen::MatrixXd::Identity(P, P));
  if (sigma.rows() != static_cast<Eigen::Index>(P))
    throw ConfigError("proposal covariance is " + std::to_string(sigma.rows()) + "x" + std::to_string(sigma.cols()) +
                      " but there are " + std::to_string(P) + " targets");
  Eigen::MatrixXd root = cholesky(sigma, "proposal covariance");
  AdaptiveProposal adaptive(sigma);

  auto set_targets = [&](ModelState& s, const Eigen::VectorXd& z) {
    for (std::size_t i = 0; i < P; ++i) s[targets[i]] = transforms[i].from_real(z[i]);
  };
  auto log_prior = [&](ModelState& s, const Eigen::VectorXd& z) {
    try {
      double lp = calculate(graph, s, prior_nodes);
      for (std::size_t i = 0; i < P; ++i) lp += transforms[i].log_jacobian(z[i]);
      return std::isnan(lp) ? kNegInf : lp;
    } catch (const ParameterDomainError&) {
      return kNegInf;
    }
  };

  PmmhChain chain;
  chain.nodes = targets;
  for (NodeId id : targets) chain.names.push_back(graph.node(id).name);
  auto estimate = [&](const ModelState& s, const Rng& r) -> LikelihoodEstimate {
    try {
      LikelihoodEstimate e = estimator(s, r);
      if (std::isnan(e.log_likelihood)) e.log_likelihood = kNegInf;
      return e;
    } catch (const DegenerateWeightsError&) {
      ++chain.degenerate_filters;
      return {kNegInf, {}};
    } catch (const ParameterDomainError&) {
      return {kNegInf, {}};
    }
  };

  ModelState current = state;
  Eigen::VectorXd z(P);
  for (std::size_t i = 0; i < P; ++i) z[i] = transforms[i].to_real(current[targets[i]]);
  double cur_lp = log_prior(current, z);
  if (!std::isfinite(cur_lp)) throw ConfigError("starting values lie outside the prior support");
  LikelihoodEstimate cur = estimate(current, rng.derive({stream::kFilterRun, 0}));
  if (!std::isfinite(cur.log_likelihood))
    throw NumericalError("likelihood estimate at the starting values is zero");

  const std::size_t rows = config.iterations / config.thin;
  chain.theta.resize(rows, P);
  chain.iteration.reserve(rows);
  chain.log_likelihood.reserve(rows);
  chain.accepted.reserve(rows);

  for (std::size_t it = 1; it <= config.iterations; ++it) {
    if (config.pf_resample) cur.log_likelihood = estimate(current, rng.derive({stream::kFilterRun, it, 0})).log_likelihood;

    Rng pr = rng.derive({stream::kProposal, it});
    Eigen::VectorXd eps(P);
    for (std::size_t i = 0; i < P; ++i) eps[i] = sample({DistKind::normal, ScaleTag::precision}, std::array{0.0, 1.0}, pr);
    const Eigen::VectorXd z_star = z + root * eps;

    ModelState proposed = current;
    set_targets(proposed, z_star);
    const double lp_star = log_prior(proposed, z_star);
    bool accept = false;
    LikelihoodEstimate est{kNegInf, {}};
    if (std::isfinite(lp_star)) {
      est = estimate(proposed, rng.derive({stream::kFilterRun, it, 1}));
      if (std::isfinite(est.log_likelihood)) {
        const double log_ratio = est.log_likelihood + lp_star - cur.log_likelihood - cur_lp;
        Rng ar = rng.derive({stream::kAccept, it});
        accept = std::isnan(log_ratio) || std::log(ar.uniform()) < log_ratio;
      }
    }
    if (accept) {
      current = std::move(proposed);
      z = z_star;
      cur_lp = lp_star;
      cur.log_likelihood = est.log_likelihood;
      cur.trajectory = std::move(est.trajectory);
      ++chain.acceptances;
    }

    if (config.adaptive) {
      adaptive.observe(z);
      const bool adapting = it > AdaptiveProposal::kWarmup && (config.burn_in == 0 || it <= config.burn_in);
      if (adapting) {
        const Eigen::MatrixXd& s = adaptive.covariance(it, config.burn_in);
        Eigen::LLT<Eigen::MatrixXd> llt(s);
        if (llt.info() == Eigen::Success) root = llt.matrixL();
      }
    }

    if (it % config.thin == 0) {
      const std::size_t row = chain.iteration.size();
      for (std::size_t i = 0; i < P; ++i) chain.theta(row, i) = current[targets[i]];
      chain.iteration.push_back(it);
      chain.log_likelihood.push_back(cur.log_likelihood);
      chain.accepted.push_back(accept ? 1 : 0);
      if (!cur.trajectory.empty()) chain.trajectories.push_back(cur.trajectory);
    }
  }
  chain.final_proposal_cov = root * root.transpose();
  return chain;
}

}  // namespace smc
