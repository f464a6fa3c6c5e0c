#include <cmath>
#include <numeric>

#include "detail.hpp"
#include "smc/filters.hpp"
#include "smc/filters/parallel.hpp"

namespace smc {

FilterResult auxiliary_filter(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                              const FilterConfig& config, const Rng& rng) {
  config.validate();
  const ChainPlan plan = build_chain_plan(graph, latent, config.held);
  const std::size_t K = config.particles;
  const std::size_t T = plan.size();
  const double log_uniform = -std::log(static_cast<double>(K));

  if (config.lookahead == Lookahead::mean) {
    for (std::size_t t = 1; t < T; ++t) {
      const Node& n = graph.node(plan.steps[t].latent);
      if (n.dist.kind != DistKind::normal)
        throw ConfigError("mean lookahead needs a normal transition, but '" + n.name + "' is " +
                          std::string(dist_name(n.dist.kind)) + "; use the simulate lookahead");
    }
  }

  FilterResult result = detail::make_result(K, T, config.save_all, true);
  result.latent = plan.latent;
  result.log_likelihood = 0.0;
  result.log_likelihood_increments.resize(T);

  std::vector<double> prev_x(K), cur_x(K), log_w(K), log_first(K), log_lookahead(K);
  std::vector<double> prev_log_pi(K, log_uniform);
  std::vector<std::uint32_t> parents(K);
  std::vector<std::size_t> ids(K);
  std::iota(ids.begin(), ids.end(), std::size_t{0});

  for (std::size_t t = 0; t < T; ++t) {
    const TimeStep& step = plan.steps[t];
    const NodeId this_node[] = {step.latent};
    const NodeId prev_node = t > 0 ? plan.steps[t - 1].latent : 0;
    double log_first_sum = 0.0;

    if (t > 0) {
      // First stage: score each previous particle by the data density at
      // its lookahead value.
      parallel_for(K, config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        ModelState s = state;
        for (std::size_t k = begin; k < end; ++k) {
          s[prev_node] = prev_x[k];
          calculate(graph, s, step.prev_determ);
          if (config.lookahead == Lookahead::mean) {
            s[step.latent] = normal_mean(graph, s, step.latent);
          } else {
            Rng r = rng.derive({stream::kLookahead, t, k});
            simulate(graph, s, this_node, r);
          }
          calculate(graph, s, step.this_determ);
          log_lookahead[k] = calculate(graph, s, step.data);
          log_first[k] = prev_log_pi[k] + log_lookahead[k];
        }
      });
      const NormalizedWeights first = detail::normalize_at(log_first, t, "auxiliary first-stage");
      log_first_sum = first.log_sum;
      Rng r = rng.derive({stream::kResample, t});
      ids = resample(first.probs, K, config.method, r);
      result.resampled[t] = 1;
    }

    parallel_for(K, config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
      ModelState s = state;
      for (std::size_t k = begin; k < end; ++k) {
        Rng r = rng.derive({stream::kPropagate, t, k});
        const std::size_t j = ids[k];
        if (t == 0) {
          simulate(graph, s, plan.initial, r);
        } else {
          s[prev_node] = prev_x[j];
        }
        calculate(graph, s, step.prev_determ);
        simulate(graph, s, this_node, r);
        calculate(graph, s, step.this_determ);
        const double log_g = calculate(graph, s, step.data);
        cur_x[k] = s[step.latent];
        // At t = 0 there is no lookahead: weights are the prior-normalized
        // data densities, as in the bootstrap filter.
        log_w[k] = t == 0 ? log_g : log_g - log_lookahead[j];
        parents[k] = static_cast<std::uint32_t>(j);
      }
    });

    const NormalizedWeights w = detail::normalize_at(log_w, t, "auxiliary second-stage");
    // (sum_k w_k / K) * (sum_k w_{t|t-1,k}); the first factor alone at t = 0.
    const double increment = w.log_mean + log_first_sum;
    result.log_likelihood_increments[t] = increment;
    *result.log_likelihood += increment;
    result.ess[t] = ess(w.probs);
    detail::store_weighted(result, t, cur_x, log_w, w.log_sum);
    detail::store_ancestors(result, t, parents);

    Rng out = rng.derive({stream::kOutputResample, t});
    detail::store_equal(result, t, cur_x, resample(w.probs, K, config.method, out));

    for (std::size_t k = 0; k < K; ++k) {
      prev_x[k] = cur_x[k];
      prev_log_pi[k] = log_w[k] - w.log_sum;
    }
  }
  return result;
}

}  // namespace smc
