#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "smc/lang/ast.hpp"

namespace smc::lang {

enum class TokenKind {
  number,
  identifier,
  tilde,    // ~
  assign,   // <-
  lparen,
  rparen,
  lbracket,
  rbracket,
  lbrace,
  rbrace,
  comma,
  equals,
  colon,
  semicolon,
  plus,
  minus,
  star,
  slash,
  caret,
  end,
};

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

// Newlines and `#` comments are skipped; statement boundaries are found by
// the parser.
std::vector<Token> tokenize(std::string_view source);

std::string_view describe(TokenKind kind);

}  // namespace smc::lang
