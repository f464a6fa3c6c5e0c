#include "smc/lang/parser.hpp"

#include <optional>
#include <string>

#include "smc/error.hpp"
#include "smc/lang/lexer.hpp"

namespace smc::lang {
namespace {

struct RawArg {
  std::string name;  // empty for positional
  ExprPtr value;
  SourcePos pos;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ModelSource parse_model() {
    ModelSource m;
    if (peek().kind == TokenKind::lbrace) {
      next();
      m.statements = parse_statements(TokenKind::rbrace);
      expect(TokenKind::rbrace);
    } else {
      m.statements = parse_statements(TokenKind::end);
    }
    expect(TokenKind::end);
    return m;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(TokenKind k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, at.pos.line, at.pos.column);
  }
  const Token& expect(TokenKind k) {
    if (peek().kind != k) {
      std::string got = peek().kind == TokenKind::end ? "end of input" : "'" + peek().text + "'";
      fail("expected " + std::string(describe(k)) + ", found " + got, peek());
    }
    return next();
  }

  std::vector<Statement> parse_statements(TokenKind terminator) {
    std::vector<Statement> out;
    while (peek().kind != terminator && peek().kind != TokenKind::end) {
      if (accept(TokenKind::semicolon)) continue;
      out.push_back(parse_statement());
    }
    return out;
  }

  Statement parse_statement() {
    const Token& head = peek();
    if (head.kind == TokenKind::identifier && head.text == "for" && peek(1).kind == TokenKind::lparen)
      return parse_for();
    if (head.kind != TokenKind::identifier) fail("expected a declaration, found '" + head.text + "'", head);

    Target target;
    target.pos = head.pos;
    target.name = next().text;
    if (accept(TokenKind::lbracket)) {
      target.index = parse_expr();
      expect(TokenKind::rbracket);
    }
    if (accept(TokenKind::tilde)) return Statement{parse_distribution(std::move(target))};
    if (accept(TokenKind::assign)) return Statement{Deterministic{std::move(target), parse_expr()}};
    fail("expected '~' or '<-' after '" + target.name + "'", peek());
  }

  Statement parse_for() {
    ForLoop loop;
    loop.pos = next().pos;  // 'for'
    expect(TokenKind::lparen);
    loop.variable = expect(TokenKind::identifier).text;
    const Token& in = expect(TokenKind::identifier);
    if (in.text != "in") fail("expected 'in' in for loop header", in);
    loop.lower = parse_unary();
    expect(TokenKind::colon);
    loop.upper = parse_unary();
    expect(TokenKind::rparen);
    if (accept(TokenKind::lbrace)) {
      loop.body = parse_statements(TokenKind::rbrace);
      expect(TokenKind::rbrace);
    } else {
      loop.body.push_back(parse_statement());
    }
    return Statement{std::move(loop)};
  }

  Stochastic parse_distribution(Target target) {
    const Token& fn = expect(TokenKind::identifier);
    DistSpec spec;
    if (fn.text == "dnorm") {
      spec.kind = DistKind::normal;
    } else if (fn.text == "dbeta") {
      spec.kind = DistKind::beta;
    } else if (fn.text == "dgamma") {
      spec.kind = DistKind::gamma;
    } else if (fn.text == "dunif") {
      spec.kind = DistKind::uniform;
    } else {
      fail("unknown distribution '" + fn.text + "'", fn);
    }
    expect(TokenKind::lparen);
    std::vector<RawArg> args;
    if (peek().kind != TokenKind::rparen) {
      do {
        RawArg a;
        a.pos = peek().pos;
        if (peek().kind == TokenKind::identifier && peek(1).kind == TokenKind::equals) {
          a.name = next().text;
          next();
        }
        a.value = parse_expr();
        args.push_back(std::move(a));
      } while (accept(TokenKind::comma));
    }
    expect(TokenKind::rparen);

    Stochastic st;
    st.target = std::move(target);
    st.dist = spec;
    bind_arguments(fn, args, st);
    return st;
  }

  // Maps positional and named arguments onto the canonical parameter slots.
  void bind_arguments(const Token& fn, const std::vector<RawArg>& args, Stochastic& st) {
    std::array<std::vector<std::string>, kDistParamCount> names;
    switch (st.dist.kind) {
      case DistKind::normal: names = {{{"mean"}, {"tau", "var", "sd"}}}; break;
      case DistKind::beta: names = {{{"shape1"}, {"shape2"}}}; break;
      case DistKind::gamma: names = {{{"shape"}, {"rate"}}}; break;
      case DistKind::uniform: names = {{{"min"}, {"max"}}}; break;
    }
    std::size_t positional = 0;
    bool seen_named = false;
    for (const auto& a : args) {
      if (a.name.empty()) {
        if (seen_named) throw ParseError("positional argument after named argument", a.pos.line, a.pos.column);
        if (positional >= kDistParamCount)
          throw ParseError("too many arguments to " + fn.text, a.pos.line, a.pos.column);
        st.params[positional++] = a.value;
        continue;
      }
      seen_named = true;
      std::optional<std::size_t> slot;
      for (std::size_t s = 0; s < kDistParamCount; ++s)
        for (const auto& n : names[s])
          if (n == a.name) slot = s;
      if (!slot)
        throw ParseError("malformed named argument '" + a.name + "' for " + fn.text, a.pos.line, a.pos.column);
      if (st.params[*slot])
        throw ParseError("argument '" + a.name + "' duplicates an earlier argument to " + fn.text, a.pos.line,
                         a.pos.column);
      st.params[*slot] = a.value;
      if (st.dist.kind == DistKind::normal && *slot == 1) {
        if (a.name == "var") st.dist.scale = ScaleTag::variance;
        if (a.name == "sd") st.dist.scale = ScaleTag::sd;
      }
    }
    for (std::size_t s = 0; s < kDistParamCount; ++s)
      if (!st.params[s]) fail(fn.text + " is missing argument '" + names[s].front() + "'", fn);
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (peek().kind == TokenKind::plus || peek().kind == TokenKind::minus) {
      const Token& op = next();
      lhs = Expr::make_binary(op.kind == TokenKind::plus ? '+' : '-', lhs, parse_term(), op.pos);
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    while (peek().kind == TokenKind::star || peek().kind == TokenKind::slash) {
      const Token& op = next();
      lhs = Expr::make_binary(op.kind == TokenKind::star ? '*' : '/', lhs, parse_unary(), op.pos);
    }
    return lhs;
  }

  // Unary minus binds looser than '^', as in R: -2^2 == -4.
  ExprPtr parse_unary() {
    if (peek().kind == TokenKind::minus) {
      const Token& op = next();
      return Expr::make_negate(parse_unary(), op.pos);
    }
    if (accept(TokenKind::plus)) return parse_unary();
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (peek().kind == TokenKind::caret) {
      const Token& op = next();
      return Expr::make_binary('^', base, parse_unary(), op.pos);
    }
    return base;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::number: next(); return Expr::make_number(t.number, t.pos);
      case TokenKind::lparen: {
        next();
        ExprPtr e = parse_expr();
        expect(TokenKind::rparen);
        return e;
      }
      case TokenKind::identifier: {
        next();
        if (accept(TokenKind::lbracket)) {
          ExprPtr idx = parse_expr();
          expect(TokenKind::rbracket);
          return Expr::make_index(t.text, idx, t.pos);
        }
        if (peek().kind == TokenKind::lparen) {
          if (t.text != "exp" && t.text != "log" && t.text != "sqrt") fail("unknown function '" + t.text + "'", t);
          next();
          ExprPtr arg = parse_expr();
          expect(TokenKind::rparen);
          return Expr::make_call(t.text, arg, t.pos);
        }
        return Expr::make_identifier(t.text, t.pos);
      }
      default: {
        std::string got = t.kind == TokenKind::end ? "end of input" : "'" + t.text + "'";
        fail("expected an expression, found " + got, t);
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ModelSource parse(std::string_view text) { return Parser(tokenize(text)).parse_model(); }

}  // namespace smc::lang
