#pragma once

// Shared helpers for the test suite: a seeded random formula generator, small
// independent oracles (equivalence-relation counting, propositional truth
// tables, a naive extent-closure fixpoint) and a derivation mutator. The
// oracles deliberately avoid the library's own enumeration/closure code paths
// so the suites cross-check two implementations.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <kywhy/proofs.hpp>

namespace kywhy::testgen {

// --- random formulas --------------------------------------------------------

class FormulaGen {
 public:
  FormulaGen(std::uint64_t seed, std::vector<std::string> atoms,
             std::vector<std::string> agents)
      : rng_(seed), atoms_(std::move(atoms)), agents_(std::move(agents)) {}

  // announcement-free, Ky only
  Formula elky(int depth) { return gen(depth, false, false); }
  // announcement-free, Kyr only
  Formula elkyr(int depth) { return gen(depth, true, false); }
  // announcements + Ky
  Formula pafky(int depth) { return gen(depth, false, true); }

  std::uint64_t raw() { return rng_(); }

  // Purely propositional formulas (atoms, negation, conjunction, implication,
  // disjunction).
  Formula prop(int depth) {
    if (depth <= 0) return atom();
    switch (pick(8)) {
      case 0:
      case 1:
        return atom();
      case 2:
      case 3:
        return Formula::not_(prop(depth - 1));
      case 4:
      case 5:
        return Formula::and_(prop(depth - 1), prop(depth - 1));
      case 6:
        return Formula::implies(prop(depth - 1), prop(depth - 1));
      default:
        return Formula::or_(prop(depth - 1), prop(depth - 1));
    }
  }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> atoms_;
  std::vector<std::string> agents_;

  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  Formula atom() { return Formula::atom(atoms_[pick(static_cast<int>(atoms_.size()))]); }
  const std::string& agent() { return agents_[pick(static_cast<int>(agents_.size()))]; }

  Formula gen(int depth, bool kyr, bool announce) {
    if (depth <= 0) return atom();
    switch (pick(announce ? 12 : 10)) {
      case 0:
      case 1:
        return atom();
      case 2:
      case 3:
        return Formula::not_(gen(depth - 1, kyr, announce));
      case 4:
      case 5:
        return Formula::and_(gen(depth - 1, kyr, announce), gen(depth - 1, kyr, announce));
      case 6:
        return Formula::implies(gen(depth - 1, kyr, announce), gen(depth - 1, kyr, announce));
      case 7:
        return Formula::k(agent(), gen(depth - 1, kyr, announce));
      case 8:
      case 9:
        return kyr ? Formula::kyr(agent(), gen(depth - 1, kyr, announce),
                                  gen(depth - 1, kyr, announce))
                   : Formula::ky(agent(), gen(depth - 1, kyr, announce));
      default:
        return Formula::announce(gen(depth - 1, kyr, announce), gen(depth - 1, kyr, announce));
    }
  }
};

// --- equivalence-relation count oracle --------------------------------------

// Counts reflexive, symmetric, transitive relations over n elements by
// scanning all 2^(n*n) bit matrices. Practical for n <= 4.
inline int count_equivalence_relations(int n) {
  int count = 0;
  for (std::uint64_t bits = 0; bits < (1ull << (n * n)); ++bits) {
    auto rel = [&](int i, int j) { return ((bits >> (i * n + j)) & 1) != 0; };
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = rel(i, i);
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) {
        if (rel(i, j) != rel(j, i)) ok = false;
        for (int k = 0; k < n && ok; ++k)
          if (rel(i, j) && rel(j, k) && !rel(i, k)) ok = false;
      }
    if (ok) ++count;
  }
  return count;
}

// --- propositional truth-table oracle ---------------------------------------

// Evaluates a purely propositional formula under an assignment keyed by atom
// name (absent atoms read false).
inline bool eval_propositional(const Formula& f, const std::map<std::string, bool>& assignment) {
  switch (f.kind()) {
    case Kind::Atom: {
      auto it = assignment.find(f.name());
      return it != assignment.end() && it->second;
    }
    case Kind::Not:
      return !eval_propositional(f.operand(), assignment);
    case Kind::And:
      return eval_propositional(f.lhs(), assignment) && eval_propositional(f.rhs(), assignment);
    default:
      throw Error("eval_propositional: not a propositional formula");
  }
}

inline bool brute_force_tautology(const Formula& f) {
  std::vector<std::string> atoms = f.atom_names();
  // atom_names skips the reserved top/bottom encoding atom; include it so the
  // oracle sees exactly the propositional variables of the tree
  bool has_p0 = false;
  f.visit([&](const Formula& g) {
    if (g.kind() == Kind::Atom && g.name() == "p0") has_p0 = true;
  });
  if (has_p0) atoms.push_back("p0");
  if (atoms.size() > 20) throw Error("brute_force_tautology: too many atoms");
  for (std::uint64_t bits = 0; bits < (1ull << atoms.size()); ++bits) {
    std::map<std::string, bool> assignment;
    for (std::size_t i = 0; i < atoms.size(); ++i) assignment[atoms[i]] = ((bits >> i) & 1) != 0;
    if (!eval_propositional(f, assignment)) return false;
  }
  return true;
}

// --- naive extent-closure oracle --------------------------------------------

// Fixpoint over (formula, extent) pairs: whenever one entry's formula is an
// implication whose antecedent is another entry's formula and whose consequent
// is tracked, the intersection joins the consequent's extents. Extents are
// compared as raw masks; witness terms are ignored.
inline std::map<std::string, std::set<std::uint64_t>> naive_extent_closure(
    const std::vector<Formula>& tracked,
    const std::vector<std::pair<Formula, std::uint64_t>>& initial) {
  std::map<std::string, std::set<std::uint64_t>> out;
  std::vector<std::pair<Formula, std::uint64_t>> pool;
  auto tracked_formula = [&](const Formula& g) {
    for (const auto& t : tracked)
      if (t == g) return true;
    return false;
  };
  auto add = [&](const Formula& g, std::uint64_t mask) {
    if (!tracked_formula(g)) return false;
    if (out[print_formula(g)].insert(mask).second) {
      pool.emplace_back(g, mask);
      return true;
    }
    return false;
  };
  for (const auto& t : tracked) out[print_formula(t)];
  for (const auto& [g, mask] : initial) add(g, mask);
  bool changed = true;
  while (changed) {
    changed = false;
    std::size_t sz = pool.size();
    for (std::size_t i = 0; i < sz; ++i)
      for (std::size_t j = 0; j < sz; ++j) {
        auto imp = pool[i].first.as_implication();
        if (!imp || !(imp->first == pool[j].first)) continue;
        if (add(imp->second, pool[i].second & pool[j].second)) changed = true;
      }
  }
  return out;
}

// --- derivation mutations ----------------------------------------------------

// One broken variant per line: a wrong (but in-range) reference when the line
// has references and an alternative exists, otherwise a wrong rule name.
// Returns (1-based mutated line, mutated derivation) pairs.
inline std::vector<std::pair<int, Derivation>> line_mutations(const Derivation& d) {
  std::vector<std::pair<int, Derivation>> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    Derivation m = d;
    DerivationLine& ln = m[i];
    bool mutated = false;
    if (!ln.refs.empty() && i >= 2) {
      int orig = ln.refs[0];
      int alt = orig == 1 ? 2 : 1;  // stays in [1, i] since i >= 2
      if (alt <= static_cast<int>(i) && alt != orig) {
        ln.refs[0] = alt;
        mutated = true;
      }
    }
    if (!mutated) ln.rule = (ln.rule == "PT") ? "T" : "PT";
    out.emplace_back(static_cast<int>(i) + 1, std::move(m));
  }
  return out;
}

}  // namespace kywhy::testgen
