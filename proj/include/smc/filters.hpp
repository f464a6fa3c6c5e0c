#pragma once

#include <string_view>

#include "smc/filters/chain_plan.hpp"
#include "smc/filters/filter.hpp"

namespace smc {

// All filters hold every node outside the latent chain at its value in
// `state` (apart from Liu-West parameters, which are filtered jointly).
// Draws come from streams derived from `rng`, one per (stage, time, particle),
// so results do not depend on config.threads.

// Proposal is the transition prior; weights are observation densities
// carried over from the previous step when resampling was skipped.
FilterResult bootstrap_filter(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                              const FilterConfig& config, const Rng& rng);

// First-stage weights from a lookahead value (transition mean or a simulated
// draw), one resampling step, second-stage weights g(y|x) / g(y|lookahead).
FilterResult auxiliary_filter(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                              const FilterConfig& config, const Rng& rng);

// Joint state and parameter filtering with kernel shrinkage governed by
// config.discount over the nodes named in config.parameters.
FilterResult liu_west_filter(const ModelGraph& graph, const ModelState& state, std::string_view latent,
                             const FilterConfig& config, const Rng& rng);

// Ensemble Kalman filter with perturbed observations. Observations must be
// normal with a variance that does not depend on the latent state.
FilterResult enkf(const ModelGraph& graph, const ModelState& state, std::string_view latent, const FilterConfig& config,
                  const Rng& rng);

struct LiuWestKernel {
  double shrinkage;  // a
  double variance;   // h^2
};

// a = (3d - 1) / (2d), h^2 = 1 - a^2.
LiuWestKernel liu_west_kernel(double discount);

}  // namespace smc
