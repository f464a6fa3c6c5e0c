#pragma once

#include "smc/graph.hpp"
#include "smc/runtime.hpp"

namespace smc {

enum class TransformKind { identity, log, logit };

// Map between a parameter's support and the real line: log for positive
// priors, (scaled) logit for bounded ones, identity otherwise.
struct ParamTransform {
  TransformKind kind = TransformKind::identity;
  double lower = 0.0;
  double upper = 1.0;

  double to_real(double value) const;
  double from_real(double z) const;
  // log |d value / d z| at z.
  double log_jacobian(double z) const;

  // Transform matching the prior of `id` at the current state. With
  // `enabled == false` the identity is returned.
  static ParamTransform for_node(const ModelGraph& graph, const ModelState& state, NodeId id, bool enabled = true);
};

}  // namespace smc
