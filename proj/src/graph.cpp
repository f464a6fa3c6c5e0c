#include "smc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "smc/error.hpp"

namespace smc {

std::string_view role_name(NodeRole role) {
  switch (role) {
    case NodeRole::latent: return "latent";
    case NodeRole::observation: return "observation";
    case NodeRole::parameter: return "parameter";
    case NodeRole::deterministic: return "deterministic";
  }
  return "?";
}

void Program::push_constant(double v) {
  code_.push_back({Op::constant, v, 0});
  max_depth_ = std::max(max_depth_, ++depth_);
}

void Program::push_node(NodeId id) {
  code_.push_back({Op::node, 0.0, id});
  max_depth_ = std::max(max_depth_, ++depth_);
}

void Program::push_op(Op op) {
  code_.push_back({op, 0.0, 0});
  switch (op) {
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::pow: --depth_; break;
    default: break;
  }
}

namespace {

double run(std::span<const Program::Instr> code, std::span<const double> values, double* stack) {
  int top = -1;
  for (const auto& in : code) {
    switch (in.op) {
      case Program::Op::constant: stack[++top] = in.value; break;
      case Program::Op::node: stack[++top] = values[in.node]; break;
      case Program::Op::add: stack[top - 1] += stack[top]; --top; break;
      case Program::Op::sub: stack[top - 1] -= stack[top]; --top; break;
      case Program::Op::mul: stack[top - 1] *= stack[top]; --top; break;
      case Program::Op::div: stack[top - 1] /= stack[top]; --top; break;
      case Program::Op::pow: stack[top - 1] = std::pow(stack[top - 1], stack[top]); --top; break;
      case Program::Op::neg: stack[top] = -stack[top]; break;
      case Program::Op::exp: stack[top] = std::exp(stack[top]); break;
      case Program::Op::log: stack[top] = std::log(stack[top]); break;
      case Program::Op::sqrt: stack[top] = std::sqrt(stack[top]); break;
    }
  }
  return stack[0];
}

}  // namespace

double Program::evaluate(std::span<const double> values) const {
  constexpr int kInline = 32;
  if (max_depth_ <= kInline) {
    double stack[kInline];
    return run(code_, values, stack);
  }
  std::vector<double> stack(static_cast<std::size_t>(max_depth_));
  return run(code_, values, stack.data());
}

std::vector<NodeId> Program::node_refs() const {
  std::vector<NodeId> out;
  for (const auto& in : code_)
    if (in.op == Op::node) out.push_back(in.node);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<NodeId> ModelGraph::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

NodeId ModelGraph::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw LookupError("unknown node '" + std::string(name) + "'");
}

bool ModelGraph::has_variable(std::string_view variable) const {
  return by_variable_.find(variable) != by_variable_.end();
}

std::vector<NodeId> ModelGraph::variable_nodes(std::string_view variable) const {
  auto it = by_variable_.find(variable);
  if (it == by_variable_.end()) throw LookupError("unknown variable '" + std::string(variable) + "'");
  return it->second;
}

std::vector<NodeId> ModelGraph::latent_nodes(std::string_view variable) const {
  auto ids = variable_nodes(variable);
  for (NodeId id : ids)
    if (nodes_[id].role != NodeRole::latent)
      throw LookupError("node '" + nodes_[id].name + "' is not latent (role " +
                        std::string(role_name(nodes_[id].role)) + ")");
  return ids;
}

std::span<const NodeId> ModelGraph::dependencies(NodeId id, DependencyFilter filter) const {
  if (id >= nodes_.size()) throw LookupError("node id out of range");
  return deps_[id][static_cast<std::size_t>(filter)];
}

std::vector<NodeId> ModelGraph::dependencies(std::span<const NodeId> ids, DependencyFilter filter) const {
  std::set<NodeId> seen(ids.begin(), ids.end());
  std::vector<NodeId> out;
  for (NodeId id : ids)
    for (NodeId d : dependencies(id, filter))
      if (seen.insert(d).second) out.push_back(d);
  std::sort(out.begin(), out.end(), [&](NodeId a, NodeId b) { return nodes_[a].topo_rank < nodes_[b].topo_rank; });
  return out;
}

std::vector<NodeId> ModelGraph::stochastic_parents(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack(nodes_.at(id).parents);
  std::set<NodeId> seen;
  while (!stack.empty()) {
    NodeId p = stack.back();
    stack.pop_back();
    if (!seen.insert(p).second) continue;
    if (nodes_[p].stochastic) {
      out.push_back(p);
    } else {
      stack.insert(stack.end(), nodes_[p].parents.begin(), nodes_[p].parents.end());
    }
  }
  std::sort(out.begin(), out.end(), [&](NodeId a, NodeId b) { return nodes_[a].topo_rank < nodes_[b].topo_rank; });
  return out;
}

namespace {

struct Term {
  AffineForm form;
  bool linear = true;

  bool is_constant() const { return linear && form.coefficients.empty(); }
};

Term constant_term(double v) {
  Term t;
  t.form.constant = v;
  return t;
}

Term nonlinear() {
  Term t;
  t.linear = false;
  return t;
}

Term scale(Term t, double s) {
  t.form.constant *= s;
  for (auto& [id, c] : t.form.coefficients) c *= s;
  return t;
}

Term add(Term a, const Term& b, double sign) {
  if (!a.linear || !b.linear) return nonlinear();
  a.form.constant += sign * b.form.constant;
  for (const auto& [id, c] : b.form.coefficients) a.form.coefficients[id] += sign * c;
  return a;
}

Term analyse(const ModelGraph& g, const Program& prog, const std::function<bool(NodeId)>& is_var,
             std::span<const double> values, int depth);

Term node_term(const ModelGraph& g, NodeId id, const std::function<bool(NodeId)>& is_var,
               std::span<const double> values, int depth) {
  if (is_var(id)) {
    Term t;
    t.form.coefficients[id] = 1.0;
    return t;
  }
  const Node& n = g.node(id);
  if (!n.stochastic) return analyse(g, n.value, is_var, values, depth + 1);
  return constant_term(values[id]);
}

Term analyse(const ModelGraph& g, const Program& prog, const std::function<bool(NodeId)>& is_var,
             std::span<const double> values, int depth) {
  if (depth > 256) return nonlinear();
  std::vector<Term> st;
  for (const auto& in : prog.code()) {
    using Op = Program::Op;
    switch (in.op) {
      case Op::constant: st.push_back(constant_term(in.value)); break;
      case Op::node: st.push_back(node_term(g, in.node, is_var, values, depth)); break;
      case Op::neg: st.back() = st.back().linear ? scale(st.back(), -1.0) : nonlinear(); break;
      case Op::exp:
      case Op::log:
      case Op::sqrt: {
        Term& t = st.back();
        if (!t.is_constant()) {
          t = nonlinear();
          break;
        }
        const double v = t.form.constant;
        t = constant_term(in.op == Op::exp ? std::exp(v) : in.op == Op::log ? std::log(v) : std::sqrt(v));
        break;
      }
      default: {
        Term b = std::move(st.back());
        st.pop_back();
        Term a = std::move(st.back());
        st.pop_back();
        Term r;
        switch (in.op) {
          case Op::add: r = add(std::move(a), b, 1.0); break;
          case Op::sub: r = add(std::move(a), b, -1.0); break;
          case Op::mul:
            if (a.is_constant() && b.linear) {
              r = scale(std::move(b), a.form.constant);
            } else if (b.is_constant() && a.linear) {
              r = scale(std::move(a), b.form.constant);
            } else {
              r = nonlinear();
            }
            break;
          case Op::div: r = (b.is_constant() && a.linear) ? scale(std::move(a), 1.0 / b.form.constant) : nonlinear(); break;
          case Op::pow:
            r = (a.is_constant() && b.is_constant()) ? constant_term(std::pow(a.form.constant, b.form.constant))
                                                     : nonlinear();
            break;
          default: r = nonlinear(); break;
        }
        st.push_back(std::move(r));
      }
    }
  }
  return st.empty() ? nonlinear() : st.back();
}

}  // namespace

std::optional<AffineForm> affine_form(const ModelGraph& graph, const Program& program,
                                      const std::function<bool(NodeId)>& is_variable,
                                      std::span<const double> values) {
  Term t = analyse(graph, program, is_variable, values, 0);
  if (!t.linear) return std::nullopt;
  std::erase_if(t.form.coefficients, [](const auto& kv) { return kv.second == 0.0; });
  return t.form;
}

bool references(const ModelGraph& graph, const Program& program, const std::function<bool(NodeId)>& pred) {
  for (NodeId id : program.node_refs()) {
    if (pred(id)) return true;
    const Node& n = graph.node(id);
    if (!n.stochastic && references(graph, n.value, pred)) return true;
  }
  return false;
}

}  // namespace smc
