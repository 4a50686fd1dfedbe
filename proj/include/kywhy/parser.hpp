#pragma once

// Recursive-descent parser for the concrete formula syntax.
//
//   formula := imp ('<->' formula)?           right-associative, lowest
//   imp     := disj ('->' imp)?               right-associative
//   disj    := conj ('|' conj)*
//   conj    := unary ('&' unary)*
//   unary   := '~' unary | '!' unary
//            | '[' formula ']' unary          public announcement
//            | '<' formula '>' unary          diamond announcement
//            | 'K' '{' id '}' unary
//            | 'Ky' '{' id '}' unary
//            | 'Kyr' '{' id '}' '(' formula ',' formula ')'
//            | 'top' | 'bot' | id | '(' formula ')'
//
// Identifiers are [a-z0-9_]+ ('top'/'bot' reserved). All derived connectives
// normalize at construction; see formula.hpp.

#include <cstddef>
#include <string>
#include <string_view>

#include "formula.hpp"

namespace kywhy {

struct ParseError : Error {
  std::size_t offset, line, column;
  ParseError(std::size_t off, std::size_t ln, std::size_t col, const std::string& what)
      : Error(std::to_string(ln) + ":" + std::to_string(col) + ": " + what),
        offset(off),
        line(ln),
        column(col) {}
};

namespace detail {

enum class Tok {
  End, Ident, Top, Bot, K, Ky, Kyr,
  LBrace, RBrace, LPar, RPar, LBracket, RBracket, Lt, Gt,
  Comma, Not, And, Or, Arrow, DArrow,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset, line, column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws();
    std::size_t off = pos_, ln = line_, col = col_;
    auto tok = [&](Tok k, std::string t) { return Token{k, std::move(t), off, ln, col}; };
    if (pos_ >= src_.size()) return tok(Tok::End, "");
    char c = src_[pos_];
    if (is_lower_id(c)) {
      std::string word;
      while (pos_ < src_.size() && is_lower_id(src_[pos_])) word += advance();
      if (word == "top") return tok(Tok::Top, word);
      if (word == "bot") return tok(Tok::Bot, word);
      return tok(Tok::Ident, word);
    }
    if (c >= 'A' && c <= 'Z') {
      std::string word;
      while (pos_ < src_.size() && is_alnum(src_[pos_])) word += advance();
      if (word == "K") return tok(Tok::K, word);
      if (word == "Ky") return tok(Tok::Ky, word);
      if (word == "Kyr") return tok(Tok::Kyr, word);
      fail(off, ln, col, "unknown operator token '" + word + "'");
    }
    switch (c) {
      case '{': advance(); return tok(Tok::LBrace, "{");
      case '}': advance(); return tok(Tok::RBrace, "}");
      case '(': advance(); return tok(Tok::LPar, "(");
      case ')': advance(); return tok(Tok::RPar, ")");
      case '[': advance(); return tok(Tok::LBracket, "[");
      case ']': advance(); return tok(Tok::RBracket, "]");
      case ',': advance(); return tok(Tok::Comma, ",");
      case '~': case '!': advance(); return tok(Tok::Not, "~");
      case '&': advance(); return tok(Tok::And, "&");
      case '|': advance(); return tok(Tok::Or, "|");
      case '>': advance(); return tok(Tok::Gt, ">");
      case '<':
        if (src_.substr(pos_, 3) == "<->") {
          advance(); advance(); advance();
          return tok(Tok::DArrow, "<->");
        }
        advance();
        return tok(Tok::Lt, "<");
      case '-':
        if (src_.substr(pos_, 2) == "->") {
          advance(); advance();
          return tok(Tok::Arrow, "->");
        }
        fail(off, ln, col, "expected '->'");
      default:
        fail(off, ln, col, std::string("unexpected character '") + c + "'");
    }
    return tok(Tok::End, "");  // unreachable
  }

  [[noreturn]] static void fail(std::size_t off, std::size_t ln, std::size_t col,
                                const std::string& msg) {
    throw ParseError(off, ln, col, msg);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;

  static bool is_lower_id(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  }
  static bool is_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

  Formula parse() {
    Formula f = parse_iff();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  Lexer lex_;
  Token cur_;

  void bump() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& msg) {
    Lexer::fail(cur_.offset, cur_.line, cur_.column,
                msg + (cur_.kind == Tok::End ? ", found end of input" : ", found '" + cur_.text + "'"));
  }

  void expect(Tok k, const std::string& what) {
    if (cur_.kind != k) fail("expected " + what);
    bump();
  }

  Formula parse_iff() {
    Formula l = parse_imp();
    if (cur_.kind == Tok::DArrow) {
      bump();
      return Formula::iff(std::move(l), parse_iff());
    }
    return l;
  }

  Formula parse_imp() {
    Formula l = parse_disj();
    if (cur_.kind == Tok::Arrow) {
      bump();
      return Formula::implies(std::move(l), parse_imp());
    }
    return l;
  }

  Formula parse_disj() {
    Formula l = parse_conj();
    while (cur_.kind == Tok::Or) {
      bump();
      l = Formula::or_(std::move(l), parse_conj());
    }
    return l;
  }

  Formula parse_conj() {
    Formula l = parse_unary();
    while (cur_.kind == Tok::And) {
      bump();
      l = Formula::and_(std::move(l), parse_unary());
    }
    return l;
  }

  std::string parse_braced_agent() {
    expect(Tok::LBrace, "'{'");
    if (cur_.kind != Tok::Ident) fail("expected agent id");
    std::string agent = cur_.text;
    bump();
    expect(Tok::RBrace, "'}'");
    return agent;
  }

  Formula parse_unary() {
    switch (cur_.kind) {
      case Tok::Not:
        bump();
        return Formula::not_(parse_unary());
      case Tok::LBracket: {
        bump();
        Formula ann = parse_iff();
        expect(Tok::RBracket, "']'");
        return Formula::announce(std::move(ann), parse_unary());
      }
      case Tok::Lt: {
        bump();
        Formula ann = parse_iff();
        expect(Tok::Gt, "'>'");
        return Formula::diamond(std::move(ann), parse_unary());
      }
      case Tok::K: {
        bump();
        std::string agent = parse_braced_agent();
        return Formula::k(agent, parse_unary());
      }
      case Tok::Ky: {
        bump();
        std::string agent = parse_braced_agent();
        return Formula::ky(agent, parse_unary());
      }
      case Tok::Kyr: {
        bump();
        std::string agent = parse_braced_agent();
        expect(Tok::LPar, "'('");
        Formula cond = parse_iff();
        expect(Tok::Comma, "','");
        Formula body = parse_iff();
        expect(Tok::RPar, "')'");
        return Formula::kyr(agent, std::move(cond), std::move(body));
      }
      default:
        return parse_primary();
    }
  }

  Formula parse_primary() {
    switch (cur_.kind) {
      case Tok::Top:
        bump();
        return Formula::top();
      case Tok::Bot:
        bump();
        return Formula::bottom();
      case Tok::Ident: {
        Formula f = Formula::atom(cur_.text);
        bump();
        return f;
      }
      case Tok::LPar: {
        bump();
        Formula f = parse_iff();
        expect(Tok::RPar, "')'");
        return f;
      }
      default:
        fail("expected formula");
    }
  }
};

}  // namespace detail

inline Formula parse_formula(std::string_view src) { return detail::Parser(src).parse(); }

}  // namespace kywhy
