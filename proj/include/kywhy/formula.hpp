#pragma once

// Formula AST for the knowing-why languages (ELKY, ELKYR, PAFKY, PAFKYR).
//
// Trees are immutable and always kept in normal form: the only node kinds are
// Atom, Not, And, K, Ky, KyR and Announce. Derived connectives are desugared
// at construction time:
//   top      = ~(p0 & ~p0)          (p0 is a reserved-but-ordinary atom)
//   bot      = ~top
//   f -> g   = ~(f & ~g)
//   f | g    = ~(~f & ~g)
//   f <-> g  = (f -> g) & (g -> f)
//   <f>g     = ~[f]~g
// Structural equality on these normal forms is the one notion of equality
// used everywhere (tables, memo keys, proof checking).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace kywhy {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind : std::uint8_t { Atom, Not, And, K, Ky, KyR, Announce };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Atom: return "Atom";
    case Kind::Not: return "Not";
    case Kind::And: return "And";
    case Kind::K: return "K";
    case Kind::Ky: return "Ky";
    case Kind::KyR: return "KyR";
    case Kind::Announce: return "Announce";
  }
  return "?";
}

// Identifiers (atoms, agents, world ids, term names) are tokens over [a-z0-9_].
inline bool is_valid_id(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  return true;
}

class Formula {
 public:
  Formula() = default;  // empty handle; only valid() formulas may be used

  static Formula atom(const std::string& name) {
    if (!is_valid_id(name)) throw Error("invalid atom id '" + name + "'");
    return make(Kind::Atom, name, {}, {});
  }
  static Formula not_(Formula f) {
    check(f);
    return make(Kind::Not, "", std::move(f), {});
  }
  static Formula and_(Formula l, Formula r) {
    check(l);
    check(r);
    return make(Kind::And, "", std::move(l), std::move(r));
  }
  static Formula k(const std::string& agent, Formula body) {
    check_agent(agent);
    check(body);
    return make(Kind::K, agent, std::move(body), {});
  }
  static Formula ky(const std::string& agent, Formula body) {
    check_agent(agent);
    check(body);
    return make(Kind::Ky, agent, std::move(body), {});
  }
  static Formula kyr(const std::string& agent, Formula condition, Formula body) {
    check_agent(agent);
    check(condition);
    check(body);
    return make(Kind::KyR, agent, std::move(condition), std::move(body));
  }
  static Formula announce(Formula announcement, Formula body) {
    check(announcement);
    check(body);
    return make(Kind::Announce, "", std::move(announcement), std::move(body));
  }

  // Derived forms (normalized away).
  static Formula implies(Formula l, Formula r) { return not_(and_(std::move(l), not_(std::move(r)))); }
  static Formula or_(Formula l, Formula r) { return not_(and_(not_(std::move(l)), not_(std::move(r)))); }
  static Formula iff(Formula l, Formula r) {
    Formula forward = implies(l, r);
    Formula backward = implies(std::move(r), std::move(l));
    return and_(std::move(forward), std::move(backward));
  }
  static const Formula& top() {
    static const Formula t = not_(and_(atom("p0"), not_(atom("p0"))));
    return t;
  }
  static const Formula& bottom() {
    static const Formula b = not_(top());
    return b;
  }
  static Formula diamond(Formula announcement, Formula body) {
    return not_(announce(std::move(announcement), not_(std::move(body))));
  }

  bool valid() const { return n_ != nullptr; }
  Kind kind() const { return node().kind; }

  const std::string& name() const { return node().label; }   // Atom
  const std::string& agent() const { return node().label; }  // K / Ky / KyR

  Formula operand() const { return Formula(node().a); }      // Not
  Formula lhs() const { return Formula(node().a); }           // And
  Formula rhs() const { return Formula(node().b); }           // And
  Formula condition() const { return Formula(node().a); }     // KyR
  Formula announcement() const { return Formula(node().a); }  // Announce
  Formula body() const {                                      // K / Ky / KyR / Announce
    return Formula((kind() == Kind::KyR || kind() == Kind::Announce) ? node().b : node().a);
  }

  std::size_t hash() const { return node().h; }

  friend bool operator==(const Formula& x, const Formula& y) {
    if (x.n_ == y.n_) return true;
    if (!x.n_ || !y.n_) return false;
    return x.hash() == y.hash() && structurally_equal(*x.n_, *y.n_);
  }
  friend bool operator!=(const Formula& x, const Formula& y) { return !(x == y); }

  // Deterministic total order (kind, label, children), for sorted output.
  static int compare(const Formula& x, const Formula& y) {
    if (x.n_ == y.n_) return 0;
    if (!x.n_) return -1;
    if (!y.n_) return 1;
    if (x.kind() != y.kind()) return x.kind() < y.kind() ? -1 : 1;
    if (int c = x.node().label.compare(y.node().label); c != 0) return c < 0 ? -1 : 1;
    int ca = compare(Formula(x.node().a), Formula(y.node().a));
    if (ca != 0) return ca;
    return compare(Formula(x.node().b), Formula(y.node().b));
  }
  friend bool operator<(const Formula& x, const Formula& y) { return compare(x, y) < 0; }

  bool is_top() const { return *this == top(); }
  bool is_bottom() const { return *this == bottom(); }

  // Shape ¬(A ∧ ¬B), i.e. a (normalized) implication A -> B.
  std::optional<std::pair<Formula, Formula>> as_implication() const {
    if (kind() != Kind::Not) return std::nullopt;
    Formula inner = operand();
    if (inner.kind() != Kind::And) return std::nullopt;
    Formula r = inner.rhs();
    if (r.kind() != Kind::Not) return std::nullopt;
    return std::make_pair(inner.lhs(), r.operand());
  }

  // Preorder walk over every subformula occurrence.
  template <class Fn>
  void visit(Fn&& fn) const {
    fn(*this);
    const Node& n = node();
    if (n.a) Formula(n.a).visit(fn);
    if (n.b) Formula(n.b).visit(fn);
  }

  // Unique subformulas, children before parents (postorder, deduplicated).
  std::vector<Formula> subformulas() const;

  bool contains(Kind k) const {
    bool found = false;
    visit([&](const Formula& f) { found = found || f.kind() == k; });
    return found;
  }

  // Atoms/agents used, sorted. Atoms skips the reserved encodings of top/bot
  // so that `top` does not drag p0 into search spaces.
  std::vector<std::string> atom_names() const;
  std::vector<std::string> agent_names() const;

 private:
  struct Node {
    Kind kind;
    std::string label;
    std::shared_ptr<const Node> a, b;
    std::size_t h;
  };

  std::shared_ptr<const Node> n_;

  explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  const Node& node() const {
    if (!n_) throw Error("use of empty formula handle");
    return *n_;
  }

  static void check(const Formula& f) {
    if (!f.valid()) throw Error("empty formula operand");
  }
  static void check_agent(const std::string& a) {
    if (!is_valid_id(a)) throw Error("invalid agent id '" + a + "'");
  }

  static std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
  }

  static Formula make(Kind k, std::string label, const Formula& a, const Formula& b) {
    std::size_t h = hash_combine(static_cast<std::size_t>(k) + 1, std::hash<std::string>{}(label));
    if (a.valid()) h = hash_combine(h, a.hash());
    if (b.valid()) h = hash_combine(h, b.hash());
    return Formula(std::make_shared<Node>(Node{k, std::move(label), a.n_, b.n_, h}));
  }

  static bool structurally_equal(const Node& x, const Node& y) {
    if (x.kind != y.kind || x.label != y.label) return false;
    if (!x.a != !y.a || !x.b != !y.b) return false;
    if (x.a && !(Formula(x.a) == Formula(y.a))) return false;
    if (x.b && !(Formula(x.b) == Formula(y.b))) return false;
    return true;
  }
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};
using FormulaSet = std::unordered_set<Formula, FormulaHash>;
template <class V>
using FormulaMap = std::unordered_map<Formula, V, FormulaHash>;

inline std::vector<Formula> Formula::subformulas() const {
  std::vector<Formula> out;
  FormulaSet seen;
  // Postorder, deduplicated so shared subtrees appear once.
  std::function<void(const Formula&)> go = [&](const Formula& f) {
    if (seen.count(f)) return;
    const Node& n = f.node();
    if (n.a) go(Formula(n.a));
    if (n.b) go(Formula(n.b));
    if (seen.insert(f).second) out.push_back(f);
  };
  go(*this);
  return out;
}

inline std::vector<std::string> Formula::atom_names() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::function<void(const Formula&)> go = [&](const Formula& f) {
    if (f.is_top() || f.is_bottom()) return;  // reserved p0 encoding
    const Node& n = f.node();
    if (n.kind == Kind::Atom) {
      if (seen.insert(n.label).second) out.push_back(n.label);
      return;
    }
    if (n.a) go(Formula(n.a));
    if (n.b) go(Formula(n.b));
  };
  go(*this);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> Formula::agent_names() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  visit([&](const Formula& f) {
    Kind k = f.kind();
    if ((k == Kind::K || k == Kind::Ky || k == Kind::KyR) && seen.insert(f.agent()).second)
      out.push_back(f.agent());
  });
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Language classification and the Ky -> Ky^r embedding.

enum class LanguageTag { ELKY, ELKYR, PAFKY, PAFKYR };

inline const char* to_string(LanguageTag t) {
  switch (t) {
    case LanguageTag::ELKY: return "ELKY";
    case LanguageTag::ELKYR: return "ELKYR";
    case LanguageTag::PAFKY: return "PAFKY";
    case LanguageTag::PAFKYR: return "PAFKYR";
  }
  return "?";
}

// Minimal language containing f. Formulas with neither Ky nor Ky^r sit in the
// Ky chain (ELKY/PAFKY). Mixing Ky and Ky^r is outside all four fragments.
inline LanguageTag classify_language(const Formula& f) {
  bool ky = f.contains(Kind::Ky);
  bool kyr = f.contains(Kind::KyR);
  bool ann = f.contains(Kind::Announce);
  if (ky && kyr) throw Error("formula mixes Ky and Kyr operators; not in any of the four languages");
  if (kyr) return ann ? LanguageTag::PAFKYR : LanguageTag::ELKYR;
  return ann ? LanguageTag::PAFKY : LanguageTag::ELKY;
}

// Replace every Ky{a} f by Kyr{a}(top, f). Input must be Ky^r-free.
inline Formula embed_ky(const Formula& f) {
  switch (f.kind()) {
    case Kind::Atom: return f;
    case Kind::Not: return Formula::not_(embed_ky(f.operand()));
    case Kind::And: return Formula::and_(embed_ky(f.lhs()), embed_ky(f.rhs()));
    case Kind::K: return Formula::k(f.agent(), embed_ky(f.body()));
    case Kind::Ky: return Formula::kyr(f.agent(), Formula::top(), embed_ky(f.body()));
    case Kind::KyR: throw Error("embed_ky: input already contains Kyr");
    case Kind::Announce: return Formula::announce(embed_ky(f.announcement()), embed_ky(f.body()));
  }
  throw Error("embed_ky: bad node");
}

// ---------------------------------------------------------------------------
// Printer. Re-sugars top/bot, implications and diamonds; output reparses to
// the identical normalized tree.

namespace detail {

// precedence tiers: 1 = implication, 2 = conjunction, 3 = unary, 4 = primary
inline void print_to(const Formula& f, std::string& out, int min_prec) {
  if (f.is_bottom()) {
    out += "bot";
    return;
  }
  if (f.is_top()) {
    out += "top";
    return;
  }
  // <phi>psi  ==  ~[phi]~psi
  if (f.kind() == Kind::Not && f.operand().kind() == Kind::Announce &&
      f.operand().body().kind() == Kind::Not) {
    Formula ann = f.operand().announcement();
    Formula inner = f.operand().body().operand();
    bool paren = min_prec > 3;
    if (paren) out += '(';
    out += '<';
    print_to(ann, out, 1);
    out += '>';
    print_to(inner, out, 3);
    if (paren) out += ')';
    return;
  }
  if (auto imp = f.as_implication()) {
    bool paren = min_prec > 1;
    if (paren) out += '(';
    print_to(imp->first, out, 2);   // left operand needs strictly tighter
    out += " -> ";
    print_to(imp->second, out, 1);  // right-associative
    if (paren) out += ')';
    return;
  }
  switch (f.kind()) {
    case Kind::Atom:
      out += f.name();
      return;
    case Kind::Not:
      if (min_prec > 3) {
        out += '(';
        out += '~';
        print_to(f.operand(), out, 3);
        out += ')';
      } else {
        out += '~';
        print_to(f.operand(), out, 3);
      }
      return;
    case Kind::And: {
      bool paren = min_prec > 2;
      if (paren) out += '(';
      print_to(f.lhs(), out, 2);  // left-associative chain
      out += " & ";
      print_to(f.rhs(), out, 3);
      if (paren) out += ')';
      return;
    }
    case Kind::K:
    case Kind::Ky: {
      bool paren = min_prec > 3;
      if (paren) out += '(';
      out += (f.kind() == Kind::K) ? "K{" : "Ky{";
      out += f.agent();
      out += '}';
      print_to(f.body(), out, 3);
      if (paren) out += ')';
      return;
    }
    case Kind::KyR:
      out += "Kyr{";
      out += f.agent();
      out += "}(";
      print_to(f.condition(), out, 1);
      out += ',';
      print_to(f.body(), out, 1);
      out += ')';
      return;
    case Kind::Announce: {
      bool paren = min_prec > 3;
      if (paren) out += '(';
      out += '[';
      print_to(f.announcement(), out, 1);
      out += ']';
      print_to(f.body(), out, 3);
      if (paren) out += ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string print_formula(const Formula& f) {
  std::string out;
  detail::print_to(f, out, 1);
  return out;
}

}  // namespace kywhy
