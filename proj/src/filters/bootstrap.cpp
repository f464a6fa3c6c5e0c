#include <cmath>
#include <numeric>

#include "detail.hpp"
#include "smc/filters.hpp"
#include "smc/filters/parallel.hpp"

namespace smc {

FilterResult bootstrap_filter(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                              const FilterConfig& config, const Rng& rng) {
  config.validate();
  const ChainPlan plan = build_chain_plan(graph, latent, config.held);
  const std::size_t K = config.particles;
  const std::size_t T = plan.size();
  const double log_uniform = -std::log(static_cast<double>(K));

  FilterResult result = detail::make_result(K, T, config.save_all, true);
  result.latent = plan.latent;
  result.log_likelihood = 0.0;
  result.log_likelihood_increments.resize(T);

  // State carried between steps: particle values and their normalized
  // log-weights, plus the row of the previous weighted slot each came from.
  std::vector<double> prev_x(K), cur_x(K), log_w(K);
  std::vector<double> prev_log_pi(K, log_uniform);
  std::vector<std::uint32_t> origin(K), parents(K);
  std::iota(origin.begin(), origin.end(), 0u);

  for (std::size_t t = 0; t < T; ++t) {
    const TimeStep& step = plan.steps[t];
    const NodeId this_node[] = {step.latent};
    const NodeId prev_node = t > 0 ? plan.steps[t - 1].latent : 0;

    parallel_for(K, config.threads, [&](std::size_t begin, std::size_t end, std::size_t) {
      ModelState s = state;
      for (std::size_t k = begin; k < end; ++k) {
        Rng r = rng.derive({stream::kPropagate, t, k});
        if (t == 0) {
          simulate(graph, s, plan.initial, r);
        } else {
          s[prev_node] = prev_x[k];
        }
        calculate(graph, s, step.prev_determ);
        simulate(graph, s, this_node, r);
        calculate(graph, s, step.this_determ);
        const double log_g = calculate(graph, s, step.data);
        cur_x[k] = s[step.latent];
        log_w[k] = prev_log_pi[k] + log_g;
      }
    });

    const NormalizedWeights w = detail::normalize_at(log_w, t, "bootstrap");
    // The carried weights sum to one, so log sum_k w_k is log p(y_t | y_1:t-1).
    result.log_likelihood_increments[t] = w.log_sum;
    *result.log_likelihood += w.log_sum;
    result.ess[t] = ess(w.probs);
    detail::store_weighted(result, t, cur_x, log_w, w.log_sum);
    for (std::size_t k = 0; k < K; ++k) parents[k] = origin[k];
    detail::store_ancestors(result, t, parents);

    if (should_resample(w.probs, config.threshold)) {
      Rng r = rng.derive({stream::kResample, t});
      const auto ids = resample(w.probs, K, config.method, r);
      for (std::size_t k = 0; k < K; ++k) {
        prev_x[k] = cur_x[ids[k]];
        origin[k] = static_cast<std::uint32_t>(ids[k]);
      }
      std::fill(prev_log_pi.begin(), prev_log_pi.end(), log_uniform);
      result.resampled[t] = 1;
      detail::store_equal(result, t, cur_x, ids);
    } else {
      for (std::size_t k = 0; k < K; ++k) {
        prev_x[k] = cur_x[k];
        origin[k] = static_cast<std::uint32_t>(k);
        prev_log_pi[k] = log_w[k] - w.log_sum;
      }
      // Output-only draw: keeps the equally weighted container meaningful
      // without touching the propagated particles.
      Rng r = rng.derive({stream::kOutputResample, t});
      detail::store_equal(result, t, cur_x, resample(w.probs, K, config.method, r));
    }
  }
  return result;
}

}  // namespace smc
