#include "smc/lang/compile.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <variant>

#include "smc/error.hpp"

namespace smc {

using lang::Expr;
using lang::ExprPtr;

// Populates a ModelGraph from an unrolled model. Only reachable from compile().
class GraphBuilder {
 public:
  GraphBuilder(const lang::ModelSource& src, const lang::CompileInputs& in) : src_(src), in_(in) {}

  ModelGraph build() {
    using Env = std::map<std::string, long>;
    Env env;
    unroll(src_.statements, env);
    for (std::size_t i = 0; i < decls_.size(); ++i) resolve(static_cast<NodeId>(i));
    assign_data();
    assign_roles();
    assign_inits();
    sort_topologically();
    build_dependency_caches();
    return std::move(g_);
  }

 private:
  struct Pending {
    const lang::Statement* stmt = nullptr;
    std::map<std::string, long> env;
  };

  [[noreturn]] static void fail(const std::string& msg, lang::SourcePos pos) {
    throw CompileError(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + msg);
  }

  double constant_value(const Expr& e, const std::map<std::string, long>& env) const {
    switch (e.kind) {
      case Expr::Kind::number: return e.number;
      case Expr::Kind::identifier: {
        if (auto it = env.find(e.name); it != env.end()) return static_cast<double>(it->second);
        if (auto it = in_.constants.find(e.name); it != in_.constants.end()) return it->second;
        fail("unresolved identifier '" + e.name + "' (not a constant or loop index)", e.pos);
      }
      case Expr::Kind::negate: return -constant_value(*e.args[0], env);
      case Expr::Kind::binary: {
        const double a = constant_value(*e.args[0], env);
        const double b = constant_value(*e.args[1], env);
        switch (e.op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '/': return a / b;
          case '^': return std::pow(a, b);
        }
        break;
      }
      case Expr::Kind::call: {
        const double a = constant_value(*e.args[0], env);
        if (e.name == "exp") return std::exp(a);
        if (e.name == "log") return std::log(a);
        return std::sqrt(a);
      }
      case Expr::Kind::index: fail("indexed node '" + e.name + "' used where a constant is required", e.pos);
    }
    fail("invalid constant expression", e.pos);
  }

  long integer_value(const Expr& e, const std::map<std::string, long>& env) const {
    const double v = constant_value(e, env);
    if (!std::isfinite(v) || v != std::round(v)) fail("index expression '" + lang::to_string(e) + "' is not an integer", e.pos);
    return static_cast<long>(v);
  }

  static std::string node_name(const std::string& var, std::optional<long> idx) {
    return idx ? var + "[" + std::to_string(*idx) + "]" : var;
  }

  void declare(const lang::Statement& s, const lang::Target& target, bool stochastic,
               const std::map<std::string, long>& env) {
    std::optional<long> idx;
    if (target.index) {
      idx = integer_value(*target.index, env);
      if (*idx < 1) fail("index of '" + target.name + "' must be >= 1", target.pos);
    }
    if (in_.constants.count(target.name)) fail("'" + target.name + "' is declared and also given as a constant", target.pos);
    const std::string name = node_name(target.name, idx);
    if (g_.by_name_.count(name)) fail("duplicate declaration of '" + name + "'", target.pos);
    auto& existing = scalar_or_indexed_[target.name];
    const int kind = idx ? 2 : 1;
    if (existing != 0 && existing != kind)
      fail("'" + target.name + "' is declared both with and without an index", target.pos);
    existing = kind;

    Node n;
    n.name = name;
    n.variable = target.name;
    n.index = idx;
    n.stochastic = stochastic;
    const auto id = static_cast<NodeId>(g_.nodes_.size());
    g_.by_name_[name] = id;
    g_.by_variable_[target.name].push_back(id);
    g_.nodes_.push_back(std::move(n));
    decls_.push_back({&s, env});
  }

  void unroll(const std::vector<lang::Statement>& stmts, std::map<std::string, long>& env) {
    for (const auto& s : stmts) {
      if (auto* st = std::get_if<lang::Stochastic>(&s.node)) {
        declare(s, st->target, true, env);
      } else if (auto* dt = std::get_if<lang::Deterministic>(&s.node)) {
        declare(s, dt->target, false, env);
      } else {
        const auto& loop = std::get<lang::ForLoop>(s.node);
        const long lo = integer_value(*loop.lower, env);
        const long hi = integer_value(*loop.upper, env);
        if (in_.constants.count(loop.variable)) fail("loop index '" + loop.variable + "' shadows a constant", loop.pos);
        auto saved = env.find(loop.variable) != env.end() ? std::optional<long>(env[loop.variable]) : std::nullopt;
        // R semantics: a:b counts down when b < a.
        const long step = hi >= lo ? 1 : -1;
        for (long v = lo;; v += step) {
          env[loop.variable] = v;
          unroll(loop.body, env);
          if (v == hi) break;
        }
        if (saved) {
          env[loop.variable] = *saved;
        } else {
          env.erase(loop.variable);
        }
      }
    }
  }

  void emit(const Expr& e, const std::map<std::string, long>& env, Program& prog, std::set<NodeId>& parents) const {
    switch (e.kind) {
      case Expr::Kind::number: prog.push_constant(e.number); return;
      case Expr::Kind::identifier: {
        if (auto it = env.find(e.name); it != env.end()) {
          prog.push_constant(static_cast<double>(it->second));
          return;
        }
        if (auto it = in_.constants.find(e.name); it != in_.constants.end()) {
          prog.push_constant(it->second);
          return;
        }
        if (auto it = g_.by_name_.find(e.name); it != g_.by_name_.end()) {
          prog.push_node(it->second);
          parents.insert(it->second);
          return;
        }
        if (g_.by_variable_.count(e.name)) fail("'" + e.name + "' is indexed; use " + e.name + "[...]", e.pos);
        fail("unresolved identifier '" + e.name + "'", e.pos);
      }
      case Expr::Kind::index: {
        const long idx = integer_value(*e.args[0], env);
        const std::string name = node_name(e.name, idx);
        auto it = g_.by_name_.find(name);
        if (it == g_.by_name_.end()) fail("unresolved identifier '" + name + "'", e.pos);
        prog.push_node(it->second);
        parents.insert(it->second);
        return;
      }
      case Expr::Kind::negate:
        emit(*e.args[0], env, prog, parents);
        prog.push_op(Program::Op::neg);
        return;
      case Expr::Kind::call:
        emit(*e.args[0], env, prog, parents);
        prog.push_op(e.name == "exp" ? Program::Op::exp : e.name == "log" ? Program::Op::log : Program::Op::sqrt);
        return;
      case Expr::Kind::binary:
        emit(*e.args[0], env, prog, parents);
        emit(*e.args[1], env, prog, parents);
        switch (e.op) {
          case '+': prog.push_op(Program::Op::add); break;
          case '-': prog.push_op(Program::Op::sub); break;
          case '*': prog.push_op(Program::Op::mul); break;
          case '/': prog.push_op(Program::Op::div); break;
          case '^': prog.push_op(Program::Op::pow); break;
        }
        return;
    }
  }

  void resolve(NodeId id) {
    Node& n = g_.nodes_[id];
    const Pending& p = decls_[id];
    std::set<NodeId> parents;
    if (auto* st = std::get_if<lang::Stochastic>(&p.stmt->node)) {
      n.dist = st->dist;
      for (std::size_t i = 0; i < kDistParamCount; ++i) emit(*st->params[i], p.env, n.params[i], parents);
    } else {
      emit(*std::get<lang::Deterministic>(p.stmt->node).value, p.env, n.value, parents);
    }
    if (parents.count(id)) throw CompileError("cyclic definition: '" + n.name + "' depends on itself");
    n.parents.assign(parents.begin(), parents.end());
    for (NodeId parent : n.parents) g_.nodes_[parent].children.push_back(id);
  }

  void assign_data() {
    for (const auto& [var, values] : in_.data) {
      auto it = g_.by_variable_.find(var);
      if (it == g_.by_variable_.end()) throw CompileError("data provided for undeclared variable '" + var + "'");
      const bool indexed = g_.nodes_[it->second.front()].index.has_value();
      if (!indexed && values.size() != 1)
        throw CompileError("data for scalar node '" + var + "' must have exactly one value");
      for (std::size_t t = 0; t < values.size(); ++t) {
        const std::string name = indexed ? node_name(var, static_cast<long>(t + 1)) : var;
        auto nit = g_.by_name_.find(name);
        if (nit == g_.by_name_.end()) throw CompileError("data provided for nonexistent node '" + name + "'");
        Node& n = g_.nodes_[nit->second];
        if (!n.stochastic) throw CompileError("data provided for deterministic node '" + name + "'");
        if (!std::isfinite(values[t])) throw CompileError("data value for '" + name + "' is not finite");
        n.data = values[t];
      }
    }
  }

  void assign_roles() {
    std::set<std::string> latent(in_.latent.begin(), in_.latent.end());
    for (const auto& var : latent)
      if (!g_.by_variable_.count(var)) throw CompileError("latent variable '" + var + "' is not declared");
    for (auto& n : g_.nodes_) {
      if (!n.stochastic) {
        n.role = NodeRole::deterministic;
      } else if (n.data) {
        n.role = NodeRole::observation;
      } else if (latent.count(n.variable)) {
        n.role = NodeRole::latent;
      } else {
        n.role = NodeRole::parameter;
      }
    }
    for (const auto& var : latent) {
      for (NodeId id : g_.by_variable_[var]) {
        const Node& n = g_.nodes_[id];
        if (!n.stochastic) throw CompileError("latent variable '" + var + "' has deterministic node '" + n.name + "'");
        if (n.data) throw CompileError("latent variable '" + var + "' has observed node '" + n.name + "'");
      }
    }
  }

  void assign_inits() {
    for (const auto& [key, value] : in_.inits) {
      std::vector<NodeId> targets;
      if (auto it = g_.by_name_.find(key); it != g_.by_name_.end()) {
        targets.push_back(it->second);
      } else if (auto vit = g_.by_variable_.find(key); vit != g_.by_variable_.end()) {
        targets = vit->second;
      } else {
        g_.warnings_.push_back("ignoring initial value for unknown node '" + key + "'");
        continue;
      }
      for (NodeId id : targets) {
        Node& n = g_.nodes_[id];
        if (!n.stochastic) {
          g_.warnings_.push_back("ignoring initial value for deterministic node '" + n.name +
                                 "'; it is recomputed from its parents");
        } else if (n.data) {
          g_.warnings_.push_back("ignoring initial value for observed node '" + n.name + "'");
        } else {
          n.init = value;
        }
      }
    }
  }

  void sort_topologically() {
    const std::size_t n = g_.nodes_.size();
    std::vector<std::size_t> indegree(n);
    for (const auto& node : g_.nodes_)
      for (NodeId c : node.children) ++indegree[c];
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId i = 0; i < n; ++i)
      if (indegree[i] == 0) ready.push(i);
    while (!ready.empty()) {
      NodeId id = ready.top();
      ready.pop();
      g_.nodes_[id].topo_rank = g_.topo_.size();
      g_.topo_.push_back(id);
      for (NodeId c : g_.nodes_[id].children)
        if (--indegree[c] == 0) ready.push(c);
    }
    if (g_.topo_.size() != n) {
      for (NodeId i = 0; i < n; ++i)
        if (indegree[i] > 0) throw CompileError("cyclic definition involving '" + g_.nodes_[i].name + "'");
    }
    auto by_rank = [&](NodeId a, NodeId b) { return g_.nodes_[a].topo_rank < g_.nodes_[b].topo_rank; };
    for (auto& node : g_.nodes_) std::sort(node.children.begin(), node.children.end(), by_rank);
    for (auto& [var, ids] : g_.by_variable_)
      std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
        return g_.nodes_[a].index.value_or(0) < g_.nodes_[b].index.value_or(0);
      });
  }

  void build_dependency_caches() {
    const std::size_t n = g_.nodes_.size();
    g_.deps_.resize(n);
    for (NodeId id = 0; id < n; ++id) {
      std::set<NodeId> seen;
      std::vector<NodeId> stack(g_.nodes_[id].children.begin(), g_.nodes_[id].children.end());
      std::vector<NodeId> all;
      while (!stack.empty()) {
        NodeId c = stack.back();
        stack.pop_back();
        if (!seen.insert(c).second) continue;
        all.push_back(c);
        if (!g_.nodes_[c].stochastic)
          stack.insert(stack.end(), g_.nodes_[c].children.begin(), g_.nodes_[c].children.end());
      }
      std::sort(all.begin(), all.end(),
                [&](NodeId a, NodeId b) { return g_.nodes_[a].topo_rank < g_.nodes_[b].topo_rank; });
      auto& slots = g_.deps_[id];
      for (NodeId d : all) {
        const Node& dn = g_.nodes_[d];
        if (!dn.stochastic) slots[static_cast<std::size_t>(DependencyFilter::deterministic_only)].push_back(d);
        if (dn.role == NodeRole::observation) slots[static_cast<std::size_t>(DependencyFilter::data_only)].push_back(d);
      }
      slots[static_cast<std::size_t>(DependencyFilter::all)] = std::move(all);
    }
  }

  const lang::ModelSource& src_;
  const lang::CompileInputs& in_;
  ModelGraph g_;
  std::vector<Pending> decls_;
  std::map<std::string, int> scalar_or_indexed_;
};

namespace lang {

ModelGraph compile(const ModelSource& source, const CompileInputs& inputs) {
  return GraphBuilder(source, inputs).build();
}

}  // namespace lang
}  // namespace smc
