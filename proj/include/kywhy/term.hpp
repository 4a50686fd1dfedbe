#pragma once

// Explanation terms: the designated self-evident term `e`, named base terms,
// and binary combinations `(s.t)` (the term-combination operation used by the
// MP-closure of explanation tables).

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "formula.hpp"

namespace kywhy {

enum class TermKind : std::uint8_t { SelfEvident, Base, Combine };

class ExplanationTerm {
 public:
  ExplanationTerm() = default;

  static const ExplanationTerm& self_evident() {
    static const ExplanationTerm e = make(TermKind::SelfEvident, "e", {}, {});
    return e;
  }
  static ExplanationTerm base(const std::string& name) {
    if (!is_valid_id(name)) throw Error("invalid term name '" + name + "'");
    if (name == "e") return self_evident();
    return make(TermKind::Base, name, {}, {});
  }
  static ExplanationTerm combine(ExplanationTerm l, ExplanationTerm r) {
    if (!l.valid() || !r.valid()) throw Error("empty term operand");
    return make(TermKind::Combine, "", std::move(l), std::move(r));
  }

  bool valid() const { return n_ != nullptr; }
  TermKind kind() const { return node().kind; }
  const std::string& name() const { return node().label; }
  ExplanationTerm left() const { return ExplanationTerm(node().a); }
  ExplanationTerm right() const { return ExplanationTerm(node().b); }
  std::size_t hash() const { return node().h; }

  friend bool operator==(const ExplanationTerm& x, const ExplanationTerm& y) {
    if (x.n_ == y.n_) return true;
    if (!x.n_ || !y.n_) return false;
    if (x.hash() != y.hash()) return false;
    if (x.kind() != y.kind() || x.name() != y.name()) return false;
    if (x.kind() == TermKind::Combine) return x.left() == y.left() && x.right() == y.right();
    return true;
  }
  friend bool operator!=(const ExplanationTerm& x, const ExplanationTerm& y) { return !(x == y); }

 private:
  struct Node {
    TermKind kind;
    std::string label;
    std::shared_ptr<const Node> a, b;
    std::size_t h;
  };
  std::shared_ptr<const Node> n_;

  explicit ExplanationTerm(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  const Node& node() const {
    if (!n_) throw Error("use of empty term handle");
    return *n_;
  }
  static ExplanationTerm make(TermKind k, std::string label, const ExplanationTerm& a,
                              const ExplanationTerm& b) {
    std::size_t h = std::hash<std::string>{}(label) * 31 + static_cast<std::size_t>(k) + 1;
    if (a.valid()) h = h * 1000003 + a.hash();
    if (b.valid()) h = h * 999983 + b.hash();
    return ExplanationTerm(std::make_shared<Node>(Node{k, std::move(label), a.n_, b.n_, h}));
  }
};

inline std::string print_term(const ExplanationTerm& t) {
  switch (t.kind()) {
    case TermKind::SelfEvident: return "e";
    case TermKind::Base: return t.name();
    case TermKind::Combine: return "(" + print_term(t.left()) + "." + print_term(t.right()) + ")";
  }
  return "?";
}

namespace detail {
inline ExplanationTerm parse_term_at(std::string_view s, std::size_t& i) {
  auto fail = [&](const std::string& msg) {
    throw ParseError(i, 1, i + 1, "term: " + msg);
  };
  if (i >= s.size()) fail("unexpected end");
  if (s[i] == '(') {
    ++i;
    ExplanationTerm l = parse_term_at(s, i);
    if (i >= s.size() || s[i] != '.') fail("expected '.'");
    ++i;
    ExplanationTerm r = parse_term_at(s, i);
    if (i >= s.size() || s[i] != ')') fail("expected ')'");
    ++i;
    return ExplanationTerm::combine(std::move(l), std::move(r));
  }
  std::string name;
  while (i < s.size() && ((s[i] >= 'a' && s[i] <= 'z') || (s[i] >= '0' && s[i] <= '9') || s[i] == '_'))
    name += s[i++];
  if (name.empty()) fail(std::string("unexpected character '") + s[i] + "'");
  return ExplanationTerm::base(name);
}
}  // namespace detail

inline ExplanationTerm parse_term(std::string_view s) {
  std::size_t i = 0;
  ExplanationTerm t = detail::parse_term_at(s, i);
  if (i != s.size()) throw ParseError(i, 1, i + 1, "term: trailing characters");
  return t;
}

}  // namespace kywhy
