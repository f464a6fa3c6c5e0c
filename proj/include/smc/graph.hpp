#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smc/distributions.hpp"

namespace smc {

using NodeId = std::uint32_t;

enum class NodeRole { latent, observation, parameter, deterministic };

std::string_view role_name(NodeRole role);

// Postfix program over node values. Produced by the compiler for every
// distribution argument and deterministic expression.
class Program {
 public:
  enum class Op : std::uint8_t { constant, node, add, sub, mul, div, pow, neg, exp, log, sqrt };

  struct Instr {
    Op op = Op::constant;
    double value = 0.0;
    NodeId node = 0;
  };

  void push_constant(double v);
  void push_node(NodeId id);
  void push_op(Op op);

  double evaluate(std::span<const double> values) const;

  std::span<const Instr> code() const { return code_; }
  std::vector<NodeId> node_refs() const;
  bool empty() const { return code_.empty(); }

 private:
  std::vector<Instr> code_;
  int depth_ = 0;
  int max_depth_ = 0;
};

struct Node {
  std::string name;      // "x[3]" or "phi"
  std::string variable;  // "x"
  std::optional<long> index;
  NodeRole role = NodeRole::parameter;
  bool stochastic = false;

  DistSpec dist;                                  // stochastic nodes
  std::array<Program, kDistParamCount> params;    // stochastic nodes
  Program value;                                  // deterministic nodes

  std::vector<NodeId> parents;
  std::vector<NodeId> children;
  std::optional<double> data;
  std::optional<double> init;
  std::size_t topo_rank = 0;
};

enum class DependencyFilter { all, deterministic_only, data_only };

// Compiled, unrolled scalar node graph. Immutable after compile().
class ModelGraph {
 public:
  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::span<const Node> nodes() const { return nodes_; }

  std::optional<NodeId> find(std::string_view name) const;
  // Throws LookupError for unknown names.
  NodeId at(std::string_view name) const;

  bool has_variable(std::string_view variable) const;
  // All scalar nodes of a variable, ascending by index.
  std::vector<NodeId> variable_nodes(std::string_view variable) const;

  std::span<const NodeId> topological_order() const { return topo_; }

  // Time-ordered latent nodes of a variable. Throws LookupError if the name
  // is unknown or the variable is not latent.
  std::vector<NodeId> latent_nodes(std::string_view variable) const;

  // Downstream dependents, stopping at (but including) stochastic nodes,
  // excluding the node itself. Sorted topologically.
  std::span<const NodeId> dependencies(NodeId id, DependencyFilter filter) const;
  std::vector<NodeId> dependencies(std::span<const NodeId> ids, DependencyFilter filter) const;

  // Stochastic ancestors reached through deterministic intermediates.
  std::vector<NodeId> stochastic_parents(NodeId id) const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  friend class GraphBuilder;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::map<std::string, std::vector<NodeId>, std::less<>> by_variable_;
  std::vector<NodeId> topo_;
  std::vector<std::array<std::vector<NodeId>, 3>> deps_;
  std::vector<std::string> warnings_;
};

// Affine view of an expression in a chosen set of "variable" nodes. Other
// stochastic nodes are treated as constants at their current values and
// deterministic nodes are expanded in place.
struct AffineForm {
  double constant = 0.0;
  std::map<NodeId, double> coefficients;
};

std::optional<AffineForm> affine_form(const ModelGraph& graph, const Program& program,
                                      const std::function<bool(NodeId)>& is_variable,
                                      std::span<const double> values);

// True if the expression reaches any node matching `pred`, looking through
// deterministic intermediates.
bool references(const ModelGraph& graph, const Program& program, const std::function<bool(NodeId)>& pred);

}  // namespace smc
