#include "smc/lang/lexer.hpp"

#include <cctype>
#include <charconv>

#include "smc/error.hpp"

namespace smc::lang {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::number: return "number";
    case TokenKind::identifier: return "identifier";
    case TokenKind::tilde: return "'~'";
    case TokenKind::assign: return "'<-'";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    case TokenKind::lbracket: return "'['";
    case TokenKind::rbracket: return "']'";
    case TokenKind::lbrace: return "'{'";
    case TokenKind::rbrace: return "'}'";
    case TokenKind::comma: return "','";
    case TokenKind::equals: return "'='";
    case TokenKind::colon: return "':'";
    case TokenKind::semicolon: return "';'";
    case TokenKind::plus: return "'+'";
    case TokenKind::minus: return "'-'";
    case TokenKind::star: return "'*'";
    case TokenKind::slash: return "'/'";
    case TokenKind::caret: return "'^'";
    case TokenKind::end: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](TokenKind kind, std::size_t len) {
    Token t;
    t.kind = kind;
    t.text = std::string(src.substr(i, len));
    t.pos = {line, col};
    out.push_back(std::move(t));
    advance(len);
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (digit(c) || (c == '.' && i + 1 < src.size() && digit(src[i + 1]))) {
      std::size_t j = i;
      while (j < src.size() && digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && digit(src[k])) {
          j = k;
          while (j < src.size() && digit(src[j])) ++j;
        }
      }
      Token t;
      t.kind = TokenKind::number;
      t.text = std::string(src.substr(i, j - i));
      t.pos = {line, col};
      // from_chars does not accept a leading '.', so pad it.
      const std::string padded = t.text.front() == '.' ? "0" + t.text : t.text;
      auto [ptr, ec] = std::from_chars(padded.data(), padded.data() + padded.size(), t.number);
      if (ec != std::errc() || ptr != padded.data() + padded.size())
        throw ParseError("malformed number '" + t.text + "'", line, col);
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (ident_start(c) || (c == '.' && i + 1 < src.size() && ident_start(src[i + 1]))) {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      push(TokenKind::identifier, j - i);
      continue;
    }
    switch (c) {
      case '~': push(TokenKind::tilde, 1); break;
      case '<':
        if (i + 1 < src.size() && src[i + 1] == '-') {
          push(TokenKind::assign, 2);
        } else {
          throw ParseError("unexpected character '<'", line, col);
        }
        break;
      case '(': push(TokenKind::lparen, 1); break;
      case ')': push(TokenKind::rparen, 1); break;
      case '[': push(TokenKind::lbracket, 1); break;
      case ']': push(TokenKind::rbracket, 1); break;
      case '{': push(TokenKind::lbrace, 1); break;
      case '}': push(TokenKind::rbrace, 1); break;
      case ',': push(TokenKind::comma, 1); break;
      case '=': push(TokenKind::equals, 1); break;
      case ':': push(TokenKind::colon, 1); break;
      case ';': push(TokenKind::semicolon, 1); break;
      case '+': push(TokenKind::plus, 1); break;
      case '-': push(TokenKind::minus, 1); break;
      case '*': push(TokenKind::star, 1); break;
      case '/': push(TokenKind::slash, 1); break;
      case '^': push(TokenKind::caret, 1); break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }
  Token end;
  end.kind = TokenKind::end;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

}  // namespace smc::lang
