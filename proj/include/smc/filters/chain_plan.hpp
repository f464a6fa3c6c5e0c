#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "smc/graph.hpp"

namespace smc {

struct TimeStep {
  NodeId latent = 0;
  std::vector<NodeId> prev_determ;  // deterministic dependents of the previous state
  std::vector<NodeId> this_determ;  // deterministic dependents of this state
  std::vector<NodeId> data;         // observations that depend on this state
};

// Per-time node sets for running a filter along one latent variable.
struct ChainPlan {
  std::vector<NodeId> latent;
  // Unobserved stochastic nodes whose only stochastic dependent is the first
  // latent node (an explicit x0, say). They are drawn per particle as part of
  // the initial state rather than held fixed.
  std::vector<NodeId> initial;
  std::vector<NodeId> initial_determ;
  std::vector<TimeStep> steps;

  std::size_t size() const { return steps.size(); }
};

// `fixed` nodes are never treated as part of the initial state. Throws
// LookupError for unknown or non-latent variables and ConfigError when the
// chain is not Markov.
ChainPlan build_chain_plan(const ModelGraph& graph, std::string_view latent, std::span<const NodeId> fixed = {});

}  // namespace smc
