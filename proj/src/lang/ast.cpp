#include "smc/lang/ast.hpp"

#include <charconv>
#include <sstream>

namespace smc::lang {

ExprPtr Expr::make_number(double v, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::number;
  e->number = v;
  e->pos = pos;
  return e;
}

ExprPtr Expr::make_identifier(std::string name, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::identifier;
  e->name = std::move(name);
  e->pos = pos;
  return e;
}

ExprPtr Expr::make_index(std::string name, ExprPtr index, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::index;
  e->name = std::move(name);
  e->args = {std::move(index)};
  e->pos = pos;
  return e;
}

ExprPtr Expr::make_negate(ExprPtr operand, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::negate;
  e->args = {std::move(operand)};
  e->pos = pos;
  return e;
}

ExprPtr Expr::make_binary(char op, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::binary;
  e->op = op;
  e->args = {std::move(lhs), std::move(rhs)};
  e->pos = pos;
  return e;
}

ExprPtr Expr::make_call(std::string fn, ExprPtr arg, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::call;
  e->name = std::move(fn);
  e->args = {std::move(arg)};
  e->pos = pos;
  return e;
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::binary:
      switch (e.op) {
        case '+':
        case '-': return 1;
        case '*':
        case '/': return 2;
        case '^': return 4;
      }
      return 0;
    case Expr::Kind::negate: return 3;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write(std::ostream& os, const Expr& e);

void write_child(std::ostream& os, const Expr& child, bool parens) {
  if (parens) os << '(';
  write(os, child);
  if (parens) os << ')';
}

void write(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::number: os << format_number(e.number); break;
    case Expr::Kind::identifier: os << e.name; break;
    case Expr::Kind::index:
      os << e.name << '[';
      write(os, *e.args[0]);
      os << ']';
      break;
    case Expr::Kind::negate:
      os << '-';
      write_child(os, *e.args[0], precedence(*e.args[0]) < 3);
      break;
    case Expr::Kind::call:
      os << e.name << '(';
      write(os, *e.args[0]);
      os << ')';
      break;
    case Expr::Kind::binary: {
      const int p = precedence(e);
      const Expr& lhs = *e.args[0];
      const Expr& rhs = *e.args[1];
      if (e.op == '^') {
        // Right associative; the exponent may be a bare negation.
        write_child(os, lhs, precedence(lhs) <= p);
        os << '^';
        write_child(os, rhs, precedence(rhs) < 3);
      } else {
        write_child(os, lhs, precedence(lhs) < p);
        os << ' ' << e.op << ' ';
        const bool non_assoc = e.op == '-' || e.op == '/';
        write_child(os, rhs, precedence(rhs) < p || (non_assoc && precedence(rhs) == p));
      }
      break;
    }
  }
}

void write_target(std::ostream& os, const Target& t) {
  os << t.name;
  if (t.index) {
    os << '[';
    write(os, *t.index);
    os << ']';
  }
}

void write_statements(std::ostream& os, const std::vector<Statement>& stmts, int depth) {
  const std::string indent(2 * depth, ' ');
  for (const auto& s : stmts) {
    os << indent;
    if (auto* st = std::get_if<Stochastic>(&s.node)) {
      write_target(os, st->target);
      os << " ~ " << dist_name(st->dist.kind) << '(';
      write(os, *st->params[0]);
      os << ", ";
      if (st->dist.kind == DistKind::normal && st->dist.scale != ScaleTag::precision)
        os << param_names(st->dist)[1] << " = ";
      write(os, *st->params[1]);
      os << ")\n";
    } else if (auto* dt = std::get_if<Deterministic>(&s.node)) {
      write_target(os, dt->target);
      os << " <- ";
      write(os, *dt->value);
      os << '\n';
    } else {
      const auto& loop = std::get<ForLoop>(s.node);
      os << "for(" << loop.variable << " in ";
      write_child(os, *loop.lower, precedence(*loop.lower) < 3);
      os << ':';
      write_child(os, *loop.upper, precedence(*loop.upper) < 3);
      os << ") {\n";
      write_statements(os, loop.body, depth + 1);
      os << indent << "}\n";
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  write(os, e);
  return os.str();
}

std::string to_string(const ModelSource& m) {
  std::ostringstream os;
  write_statements(os, m.statements, 0);
  return os.str();
}

}  // namespace smc::lang
