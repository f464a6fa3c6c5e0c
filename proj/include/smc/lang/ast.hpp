#pragma once

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "smc/distributions.hpp"

namespace smc::lang {

struct SourcePos {
  int line = 1;
  int column = 1;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression tree. Trees are immutable once built and shared freely.
struct Expr {
  enum class Kind { number, identifier, index, negate, binary, call };

  Kind kind = Kind::number;
  SourcePos pos;
  double number = 0.0;
  std::string name;  // identifier, indexed variable, or function name
  char op = 0;       // one of + - * / ^ for binary
  std::vector<ExprPtr> args;

  static ExprPtr make_number(double v, SourcePos pos);
  static ExprPtr make_identifier(std::string name, SourcePos pos);
  static ExprPtr make_index(std::string name, ExprPtr index, SourcePos pos);
  static ExprPtr make_negate(ExprPtr operand, SourcePos pos);
  static ExprPtr make_binary(char op, ExprPtr lhs, ExprPtr rhs, SourcePos pos);
  static ExprPtr make_call(std::string fn, ExprPtr arg, SourcePos pos);
};

struct Target {
  std::string name;
  ExprPtr index;  // null for scalar targets
  SourcePos pos;
};

// A `~` declaration with its arguments already mapped to canonical order.
struct Stochastic {
  Target target;
  DistSpec dist;
  std::array<ExprPtr, kDistParamCount> params;
};

// A `<-` declaration.
struct Deterministic {
  Target target;
  ExprPtr value;
};

struct Statement;

struct ForLoop {
  std::string variable;
  ExprPtr lower;
  ExprPtr upper;
  std::vector<Statement> body;
  SourcePos pos;
};

struct Statement {
  std::variant<Stochastic, Deterministic, ForLoop> node;
};

struct ModelSource {
  std::vector<Statement> statements;
};

// Canonical text form. parse(to_string(m)) reproduces m up to source positions.
std::string to_string(const Expr& e);
std::string to_string(const ModelSource& m);

}  // namespace smc::lang
