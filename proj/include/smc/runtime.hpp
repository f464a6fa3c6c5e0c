#pragma once

#include <array>
#include <span>
#include <vector>

#include "smc/graph.hpp"
#include "smc/rng.hpp"

namespace smc {

// Current value of every node. Deterministic nodes are refreshed eagerly by
// calculate(), so there is no separate validity tracking.
struct ModelState {
  std::vector<double> values;

  double& operator[](NodeId id) { return values[id]; }
  double operator[](NodeId id) const { return values[id]; }
};

// Data and initial values filled in; everything else NaN. Deterministic nodes
// whose parents are all known are evaluated.
ModelState make_state(const ModelGraph& graph);

// Simulates every unobserved stochastic node that still has no value, in
// topological order, and refreshes deterministic nodes.
void initialize(const ModelGraph& graph, ModelState& state, Rng& rng);

// Draws fresh values for the listed nodes in the order given. Deterministic
// nodes in the list are recomputed. Throws ConfigError for observed nodes.
void simulate(const ModelGraph& graph, ModelState& state, std::span<const NodeId> nodes, Rng& rng);

// Refreshes deterministic nodes in the list and returns the summed
// log-density of the stochastic ones. Parameter problems are reported as
// ParameterDomainError naming the node.
double calculate(const ModelGraph& graph, ModelState& state, std::span<const NodeId> nodes);

// Log-density of one stochastic node at its current value.
double node_log_density(const ModelGraph& graph, const ModelState& state, NodeId id);

// Distribution arguments of a stochastic node at the current state.
std::array<double, kDistParamCount> resolve_params(const ModelGraph& graph, const ModelState& state, NodeId id);

// Mean of a normal node's distribution at the current state. Throws
// ConfigError for other distributions.
double normal_mean(const ModelGraph& graph, const ModelState& state, NodeId id);

}  // namespace smc
