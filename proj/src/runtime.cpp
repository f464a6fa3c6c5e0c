#include "smc/runtime.hpp"

#include <cmath>
#include <limits>

#include "smc/error.hpp"

namespace smc {

ModelState make_state(const ModelGraph& graph) {
  ModelState s;
  s.values.assign(graph.size(), std::numeric_limits<double>::quiet_NaN());
  for (NodeId id : graph.topological_order()) {
    const Node& n = graph.node(id);
    if (n.data) {
      s[id] = *n.data;
    } else if (n.init) {
      s[id] = *n.init;
    } else if (!n.stochastic) {
      s[id] = n.value.evaluate(s.values);
    }
  }
  return s;
}

void initialize(const ModelGraph& graph, ModelState& state, Rng& rng) {
  for (NodeId id : graph.topological_order()) {
    const Node& n = graph.node(id);
    if (!n.stochastic) {
      state[id] = n.value.evaluate(state.values);
    } else if (!n.data && std::isnan(state[id])) {
      const NodeId one[] = {id};
      simulate(graph, state, one, rng);
    }
  }
}

std::array<double, kDistParamCount> resolve_params(const ModelGraph& graph, const ModelState& state, NodeId id) {
  const Node& n = graph.node(id);
  std::array<double, kDistParamCount> p{};
  for (std::size_t i = 0; i < kDistParamCount; ++i) p[i] = n.params[i].evaluate(state.values);
  return p;
}

void simulate(const ModelGraph& graph, ModelState& state, std::span<const NodeId> nodes, Rng& rng) {
  for (NodeId id : nodes) {
    const Node& n = graph.node(id);
    if (!n.stochastic) {
      state[id] = n.value.evaluate(state.values);
      continue;
    }
    if (n.data) throw ConfigError("cannot simulate observed node '" + n.name + "'");
    const auto p = resolve_params(graph, state, id);
    try {
      state[id] = sample(n.dist, p, rng);
    } catch (const ParameterDomainError& e) {
      throw ParameterDomainError("node '" + n.name + "': " + e.what());
    }
  }
}

double node_log_density(const ModelGraph& graph, const ModelState& state, NodeId id) {
  const Node& n = graph.node(id);
  const auto p = resolve_params(graph, state, id);
  try {
    return log_density(n.dist, state[id], p);
  } catch (const ParameterDomainError& e) {
    throw ParameterDomainError("node '" + n.name + "': " + e.what());
  }
}

double calculate(const ModelGraph& graph, ModelState& state, std::span<const NodeId> nodes) {
  double total = 0.0;
  for (NodeId id : nodes) {
    const Node& n = graph.node(id);
    if (!n.stochastic) {
      state[id] = n.value.evaluate(state.values);
    } else {
      total += node_log_density(graph, state, id);
    }
  }
  return total;
}

double normal_mean(const ModelGraph& graph, const ModelState& state, NodeId id) {
  const Node& n = graph.node(id);
  if (!n.stochastic || n.dist.kind != DistKind::normal)
    throw ConfigError("node '" + n.name + "' is not normally distributed, so its mean cannot be used; "
                      "use the simulate lookahead instead");
  return n.params[0].evaluate(state.values);
}

}  // namespace smc
