#include "smc/filters/chain_plan.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "smc/error.hpp"

namespace smc {

ChainPlan build_chain_plan(const ModelGraph& g, std::string_view latent, std::span<const NodeId> fixed) {
  ChainPlan plan;
  plan.latent = g.latent_nodes(latent);
  const std::size_t T = plan.latent.size();
  std::map<NodeId, std::size_t> time_of;
  for (std::size_t t = 0; t < T; ++t) time_of[plan.latent[t]] = t;

  for (std::size_t t = 0; t < T; ++t) {
    for (NodeId p : g.stochastic_parents(plan.latent[t])) {
      auto it = time_of.find(p);
      if (it == time_of.end()) continue;
      if (t == 0 || it->second != t - 1)
        throw ConfigError("latent node '" + g.node(plan.latent[t]).name + "' depends on '" + g.node(p).name +
                          "'; only the previous time point is allowed");
    }
  }

  const NodeId first = plan.latent.front();
  std::set<NodeId> fixed_set(fixed.begin(), fixed.end());
  for (NodeId p : g.stochastic_parents(first)) {
    const Node& n = g.node(p);
    if (n.role != NodeRole::parameter || fixed_set.count(p)) continue;
    bool only_first = true;
    for (NodeId d : g.dependencies(p, DependencyFilter::all))
      if (g.node(d).stochastic && d != first) only_first = false;
    if (only_first) plan.initial.push_back(p);
  }
  plan.initial_determ = g.dependencies(plan.initial, DependencyFilter::deterministic_only);

  // Each observation belongs to the latest time point it depends on.
  std::map<NodeId, std::size_t> owner;
  for (std::size_t t = 0; t < T; ++t)
    for (NodeId d : g.dependencies(plan.latent[t], DependencyFilter::data_only)) owner[d] = t;

  plan.steps.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    TimeStep& s = plan.steps[t];
    s.latent = plan.latent[t];
    if (t > 0) {
      auto prev = g.dependencies(plan.latent[t - 1], DependencyFilter::deterministic_only);
      s.prev_determ.assign(prev.begin(), prev.end());
    } else {
      s.prev_determ = plan.initial_determ;
    }
    auto cur = g.dependencies(plan.latent[t], DependencyFilter::deterministic_only);
    s.this_determ.assign(cur.begin(), cur.end());
    for (NodeId d : g.dependencies(plan.latent[t], DependencyFilter::data_only))
      if (owner[d] == t) s.data.push_back(d);
  }
  return plan;
}

}  // namespace smc
