#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "detail.hpp"
#include "smc/filters.hpp"
#include "smc/filters/parallel.hpp"
#include "smc/filters/transforms.hpp"

namespace smc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<NodeId> resolve_parameters(const ModelGraph& graph, const FilterConfig& config,
                                       std::span<const NodeId> latent) {
  if (config.parameters.empty()) throw ConfigError("Liu-West filter needs at least one parameter node");
  std::set<NodeId> seen;
  std::vector<NodeId> out;
  for (const auto& name : config.parameters) {
    std::vector<NodeId> ids;
    if (auto id = graph.find(name)) {
      ids.push_back(*id);
    } else if (graph.has_variable(name)) {
      ids = graph.variable_nodes(name);
    } else {
      throw LookupError("unknown parameter node '" + name + "'");
    }
    for (NodeId id : ids) {
      const Node& n = graph.node(id);
      if (n.role != NodeRole::parameter || std::find(latent.begin(), latent.end(), id) != latent.end())
        throw ConfigError("'" + n.name + "' is " + std::string(role_name(n.role)) +
                          "; Liu-West parameters must be unobserved stochastic nodes outside the latent chain");
      if (seen.insert(id).second) out.push_back(id);
    }
  }
  return out;
}

// Square root of a covariance matrix; falls back to a clamped eigen
// decomposition when the Cholesky factorization fails.
Eigen::MatrixXd covariance_root(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("Liu-West kernel covariance is not decomposable");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace

FilterResult liu_west_filter(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                             const FilterConfig& config, const Rng& rng) {
  config.validate();
  const LiuWestKernel kernel = liu_west_kernel(config.discount);
  const auto latent_ids = graph.latent_nodes(latent);
  const std::vector<NodeId> params = resolve_parameters(graph, config, latent_ids);
  std::vector<NodeId> held(params);
  held.insert(held.end(), config.held.begin(), config.held.end());
  const ChainPlan plan = build_chain_plan(graph, latent, held);
  const std::size_t K = config.particles;
  const std::size_t T = plan.size();
  const std::size_t P = params.size();
  const double log_uniform = -std::log(static_cast<double>(K));
  const bool raw = !config.transform_parameters;

  for (std::size_t t = 1; t < T; ++t) {
    const Node& n = graph.node(plan.steps[t].latent);
    if (n.dist.kind != DistKind::normal)
      throw ConfigError("Liu-West filter needs a normal transition to compute E(x_t | x_t-1), but '" + n.name +
                        "' is " + std::string(dist_name(n.dist.kind)));
  }

  // Parameters and the deterministic nodes downstream of them, in
  // topological order, so one simulate() call draws from the joint prior.
  const std::vector<NodeId> param_determ = graph.dependencies(params, DependencyFilter::deterministic_only);
  std::vector<NodeId> prior_order(params);
  prior_order.insert(prior_order.end(), param_determ.begin(), param_determ.end());
  std::sort(prior_order.begin(), prior_order.end(),
            [&](NodeId a, NodeId b) { return graph.node(a).topo_rank < graph.node(b).topo_rank; });

  std::vector<ParamTransform> transforms;
  {
    ModelState probe = state;
    Rng r = rng.derive({stream::kInit});
    simulate(graph, probe, prior_order, r);
    for (NodeId id : params) transforms.push_back(ParamTransform::for_node(graph, probe, id, !raw));
  }

  FilterResult result = detail::make_result(K, T, config.save_all, true);
  result.latent = plan.latent;
  const std::size_t slots = config.save_all ? T : 1;
  ParameterSamples samples;
  for (NodeId id : params) samples.names.push_back(graph.node(id).name);
  samples.nodes = params;
  samples.weighted = ParticleCloud(K, slots, P, false);
  samples.equally_weighted = ParticleCloud(K, slots, P, true);

  // Parameters are tracked on the transformed scale; z(k, i) for particle k.
  Eigen::MatrixXd z(K, P), z_new(K, P), z_shrunk(K, P), theta(K, P), prev_theta(K, P);
  std::vector<double> prev_x(K), cur_x(K), log_w(K), log_first(K), log_lookahead(K);
  std::vector<double> prev_log_pi(K, log_uniform);
  std::vector<std::uint32_t> parents(K);
  std::vector<std::size_t> ids(K);
  std::iota(ids.begin(), ids.end(), std::size_t{0});

  auto set_params = [&](ModelState& s, const Eigen::MatrixXd& m, std::size_t k) {
    for (std::size_t i = 0; i < P; ++i) s[params[i]] = transforms[i].from_real(m(k, i));
    calculate(graph, s, param_determ);
  };
  // With d = 1 the kernel is the identity; copying raw values avoids
  // round-off from the transform round trip.
  const bool identity_kernel = kernel.variance == 0.0;
  auto set_raw = [&](ModelState& s, std::size_t k) {
    for (std::size_t i = 0; i < P; ++i) s[params[i]] = prev_theta(k, i);
    calculate(graph, s, param_determ);
  };

  for (std::size_t t = 0; t < T; ++t) {
    const TimeStep& step = plan.steps[t];
    const NodeId this_node[] = {step.latent};
    const NodeId prev_node = t > 0 ? plan.steps[t - 1].latent : 0;

    if (t > 0) {
      const Eigen::VectorXd pi = Eigen::Map<const Eigen::VectorXd>(prev_log_pi.data(), K).array().exp();
      const Eigen::RowVectorXd mean = (pi.asDiagonal() * z).colwise().sum() / pi.sum();
      const Eigen::MatrixXd centered = z.rowwise() - mean;
      const Eigen::MatrixXd cov = centered.transpose() * pi.asDiagonal() * centered / pi.sum();
      const Eigen::MatrixXd root =
          kernel.variance > 0.0 ? covariance_root(kernel.variance * cov) : Eigen::MatrixXd::Zero(P, P);
      z_shrunk = (kernel.shrinkage * z).rowwise() + (1.0 - kernel.shrinkage) * mean;

      parallel_for(K, config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        ModelState s = state;
        for (std::size_t k = begin; k < end; ++k) {
          try {
            if (identity_kernel)
              set_raw(s, k);
            else
              set_params(s, z_shrunk, k);
            s[prev_node] = prev_x[k];
            calculate(graph, s, step.prev_determ);
            s[step.latent] = normal_mean(graph, s, step.latent);
            calculate(graph, s, step.this_determ);
            log_lookahead[k] = calculate(graph, s, step.data);
          } catch (const ParameterDomainError&) {
            if (!raw) throw;
            log_lookahead[k] = kNegInf;
          }
          log_first[k] = prev_log_pi[k] + log_lookahead[k];
        }
      });
      const NormalizedWeights first = detail::normalize_at(log_first, t, "Liu-West first-stage");
      Rng r = rng.derive({stream::kResample, t});
      ids = resample(first.probs, K, config.method, r);
      result.resampled[t] = 1;

      for (std::size_t k = 0; k < K; ++k) {
        Rng rk = rng.derive({stream::kKernel, t, k});
        Eigen::VectorXd eps(P);
        for (std::size_t i = 0; i < P; ++i) eps[i] = sample({DistKind::normal, ScaleTag::precision},
                                                            std::array{0.0, 1.0}, rk);
        z_new.row(k) = z_shrunk.row(ids[k]) + (root * eps).transpose();
      }
    }

    parallel_for(K, config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
      ModelState s = state;
      for (std::size_t k = begin; k < end; ++k) {
        Rng r = rng.derive({stream::kPropagate, t, k});
        const std::size_t j = ids[k];
        try {
          if (t == 0) {
            simulate(graph, s, prior_order, r);
            for (std::size_t i = 0; i < P; ++i) z_new(k, i) = transforms[i].to_real(s[params[i]]);
            simulate(graph, s, plan.initial, r);
          } else {
            if (identity_kernel)
              set_raw(s, j);
            else
              set_params(s, z_new, k);
            s[prev_node] = prev_x[j];
          }
          for (std::size_t i = 0; i < P; ++i) theta(k, i) = s[params[i]];
          // Raw-scale kernels can leave the prior support.
          if (!std::isfinite(calculate(graph, s, params))) {
            cur_x[k] = std::numeric_limits<double>::quiet_NaN();
            log_w[k] = kNegInf;
          } else {
            calculate(graph, s, step.prev_determ);
            simulate(graph, s, this_node, r);
            calculate(graph, s, step.this_determ);
            const double log_g = calculate(graph, s, step.data);
            cur_x[k] = s[step.latent];
            log_w[k] = t == 0 ? log_g : log_g - log_lookahead[j];
          }
        } catch (const ParameterDomainError&) {
          if (!raw) throw;
          cur_x[k] = std::numeric_limits<double>::quiet_NaN();
          log_w[k] = kNegInf;
        }
        parents[k] = static_cast<std::uint32_t>(j);
      }
    });

    const NormalizedWeights w = detail::normalize_at(log_w, t, "Liu-West");
    z = z_new;
    prev_theta = theta;
    result.ess[t] = ess(w.probs);
    detail::store_weighted(result, t, cur_x, log_w, w.log_sum);
    detail::store_ancestors(result, t, parents);

    Rng out = rng.derive({stream::kOutputResample, t});
    const auto out_ids = resample(w.probs, K, config.method, out);
    detail::store_equal(result, t, cur_x, out_ids);
    const std::size_t slot = result.slot(t);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < P; ++i) {
        samples.weighted.value(slot, k, i) = theta(k, i);
        samples.equally_weighted.value(slot, k, i) = theta(out_ids[k], i);
      }
      samples.weighted.set_log_weight(slot, k, log_w[k] - w.log_sum);
      prev_x[k] = cur_x[k];
      prev_log_pi[k] = log_w[k] - w.log_sum;
    }
  }
  result.parameters = std::move(samples);
  return result;
}

}  // namespace smc
