#include "smc/filters/transforms.hpp"

#include <cmath>

#include "smc/error.hpp"

namespace smc {
namespace {

double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

}  // namespace

double ParamTransform::to_real(double v) const {
  switch (kind) {
    case TransformKind::identity: return v;
    case TransformKind::log: return std::log(v);
    case TransformKind::logit: {
      const double u = (v - lower) / (upper - lower);
      return std::log(u) - std::log1p(-u);
    }
  }
  return v;
}

double ParamTransform::from_real(double z) const {
  switch (kind) {
    case TransformKind::identity: return z;
    case TransformKind::log: return std::exp(z);
    case TransformKind::logit: {
      const double u = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      return lower + (upper - lower) * u;
    }
  }
  return z;
}

double ParamTransform::log_jacobian(double z) const {
  switch (kind) {
    case TransformKind::identity: return 0.0;
    case TransformKind::log: return z;
    case TransformKind::logit: return std::log(upper - lower) + log_sigmoid(z) + log_sigmoid(-z);
  }
  return 0.0;
}

ParamTransform ParamTransform::for_node(const ModelGraph& graph, const ModelState& state, NodeId id, bool enabled) {
  const Node& n = graph.node(id);
  if (!n.stochastic) throw ConfigError("'" + n.name + "' is deterministic and cannot be a sampled parameter");
  if (n.data) throw ConfigError("'" + n.name + "' is observed and cannot be a sampled parameter");
  ParamTransform t;
  if (!enabled) return t;
  const auto p = resolve_params(graph, state, id);
  const Support s = support(n.dist, p);
  switch (s.kind) {
    case SupportKind::real_line: break;
    case SupportKind::positive: t.kind = TransformKind::log; break;
    case SupportKind::interval:
      if (!std::isfinite(s.lower) || !std::isfinite(s.upper) || !(s.lower < s.upper))
        throw ConfigError("'" + n.name + "' has a prior support that cannot be transformed");
      if (n.dist.kind == DistKind::uniform) {
        for (const auto& prog : n.params)
          if (!prog.node_refs().empty())
            throw ConfigError("'" + n.name + "' has uniform bounds that depend on other nodes; unsupported");
      }
      t.kind = TransformKind::logit;
      t.lower = s.lower;
      t.upper = s.upper;
      break;
  }
  return t;
}

}  // namespace smc
