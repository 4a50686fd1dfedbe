#pragma once

// Evaluation of formulas over KyModels under three semantics:
//
//  STANDARD   Ky_a f   at w:  K_a f  and some tracked extent X at f covers
//                             R_a(w);
//             Kyr_a(c,f) at w: with S = successors satisfying c, every v in S
//                             satisfies f, and S (if nonempty) is covered by
//                             some extent at f;
//             [g]f     at w:  w |= g implies f holds at w in the updated model.
//
//  ALT_KYR    Kyr_a(c,f) at w: with S = successors of w satisfying c (in the
//                             current model), every v in S satisfies f *in the
//                             model updated by c* and lies in a common extent
//                             at f of the *current* model. Ky is not part of
//                             this variant's language.
//
//  CONTEXT    truth is relative to a context formula rho (default top);
//             epistemic operators quantify only over successors v with
//             (m,v) |=_top rho, and [g]f conjoins g onto the context instead
//             of rebuilding the model:  (m,w) |=_rho [g]f  iff
//             (m,w) |=_rho g implies (m,w) |=_{rho & g} f.
//
// Also here (they need truth sets): update_model, validate_model,
// factive_companion, is_factive, check_correspondence, evaluation_trace.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"

namespace kywhy {

enum class VariantKind { Standard, AltKyR, Context };

inline const char* to_string(VariantKind v) {
  switch (v) {
    case VariantKind::Standard: return "STANDARD";
    case VariantKind::AltKyR: return "ALT_KYR";
    case VariantKind::Context: return "CONTEXT";
  }
  return "?";
}

struct Semantics {
  VariantKind kind = VariantKind::Standard;
  Formula context = Formula::top();  // CONTEXT only

  static Semantics standard() { return {VariantKind::Standard, Formula::top()}; }
  static Semantics alt_kyr() { return {VariantKind::AltKyR, Formula::top()}; }
  static Semantics with_context(Formula rho = Formula::top()) {
    return {VariantKind::Context, std::move(rho)};
  }
};

struct Witness {
  ExplanationTerm term;
  WorldSet extent;
};

struct EvalResult {
  bool verdict;
  std::optional<Witness> witness;  // for true top-level Ky/Kyr: covering entry
};

namespace detail {

class Evaluator {
 public:
  // universe: formulas whose extents may be queried (Ky/Kyr bodies and
  // conditions of everything that will be evaluated through this object).
  Evaluator(const KyModel& m, Semantics sem, std::vector<Formula> universe)
      : external_(&m), sem_(std::move(sem)), universe_(std::move(universe)),
        table_(saturate(m, universe_)) {}

  Evaluator(KyModel&& owned, Semantics sem, std::vector<Formula> universe)
      : owned_(std::make_unique<KyModel>(std::move(owned))), sem_(std::move(sem)),
        universe_(std::move(universe)), table_(saturate(*owned_, universe_)) {}

  const KyModel& model() const { return owned_ ? *owned_ : *external_; }
  const ExtentTable& table() const { return table_; }

  bool truth(int w, const Formula& f) {
    return sem_.kind == VariantKind::Context ? truth_ctx(w, f, sem_.context) : truth_plain(w, f);
  }

  WorldSet truth_set(const Formula& f) {
    WorldSet out;
    for (int w = 0; w < model().world_count(); ++w)
      if (truth(w, f)) out = out.with(w);
    return out;
  }

  // The constrained successor set whose coverage a true Ky/Kyr verdict needs,
  // and the first covering entry (self-evident term with empty extent when the
  // requirement is vacuous and no entry covers).
  Witness witness_for(int w, const Formula& f) {
    WorldSet s = constrained_successors(w, f);
    const Formula& body = f.body();
    if (table_.tracked(body))
      for (const auto& e : table_.entries_at(body))
        if (s.subset_of(e.extent)) return Witness{e.term, e.extent};
    return Witness{ExplanationTerm::self_evident(), WorldSet()};
  }

 private:
  const KyModel* external_ = nullptr;
  std::unique_ptr<KyModel> owned_;
  Semantics sem_;
  std::vector<Formula> universe_;
  ExtentTable table_;

  struct Key {
    Formula f;
    int w;
    Formula rho;  // invalid handle outside CONTEXT
    bool operator==(const Key& o) const {
      return w == o.w && f == o.f &&
             rho.valid() == o.rho.valid() && (!rho.valid() || rho == o.rho);
    }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = k.f.hash() * 31 + static_cast<std::size_t>(k.w);
      if (k.rho.valid()) h = h * 1000003 + k.rho.hash();
      return h;
    }
  };
  std::unordered_map<Key, bool, KeyHash> memo_;

  struct Child {
    std::unique_ptr<Evaluator> ev;
    std::vector<int> remap;  // world index here -> index in child (-1 if gone)
  };
  FormulaMap<Child> children_;

  Child& child_for(const Formula& announced) {
    auto it = children_.find(announced);
    if (it != children_.end()) return it->second;
    WorldSet keep = truth_set_plain(announced);
    KyModel sub = restrict_to(model(), keep);
    std::vector<int> remap(model().world_count(), -1);
    int next = 0;
    keep.for_each([&](int i) { remap[i] = next++; });
    Child c;
    c.ev = std::make_unique<Evaluator>(std::move(sub), sem_, universe_);
    c.remap = std::move(remap);
    return children_.emplace(announced, std::move(c)).first->second;
  }

  WorldSet truth_set_plain(const Formula& f) {
    WorldSet out;
    for (int w = 0; w < model().world_count(); ++w)
      if (truth_plain(w, f)) out = out.with(w);
    return out;
  }

  bool truth_plain(int w, const Formula& f) {
    Key key{f, w, Formula()};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool v = compute_plain(w, f);
    memo_.emplace(std::move(key), v);
    return v;
  }

  bool compute_plain(int w, const Formula& f) {
    const KyModel& m = model();
    switch (f.kind()) {
      case Kind::Atom: {
        int i = m.atom_index(f.name());
        return i >= 0 && m.valuation(i).contains(w);
      }
      case Kind::Not:
        return !truth_plain(w, f.operand());
      case Kind::And:
        return truth_plain(w, f.lhs()) && truth_plain(w, f.rhs());
      case Kind::K: {
        int a = agent_of(f);
        bool all = true;
        m.successors(a, w).for_each([&](int v) { all = all && truth_plain(v, f.body()); });
        return all;
      }
      case Kind::Ky: {
        int a = agent_of(f);
        WorldSet s = m.successors(a, w);
        bool all = true;
        s.for_each([&](int v) { all = all && truth_plain(v, f.body()); });
        if (!all) return false;
        return s.empty() || covered(f.body(), s);
      }
      case Kind::KyR: {
        int a = agent_of(f);
        WorldSet succ = m.successors(a, w);
        WorldSet s;
        succ.for_each([&](int v) {
          if (truth_plain(v, f.condition())) s = s.with(v);
        });
        if (sem_.kind == VariantKind::AltKyR) {
          if (s.empty()) return true;
          Child& c = child_for(f.condition());
          bool all = true;
          s.for_each([&](int v) { all = all && c.ev->truth_plain(c.remap[v], f.body()); });
          return all && covered(f.body(), s);
        }
        bool all = true;
        s.for_each([&](int v) { all = all && truth_plain(v, f.body()); });
        if (!all) return false;
        return s.empty() || covered(f.body(), s);
      }
      case Kind::Announce: {
        if (!truth_plain(w, f.announcement())) return true;
        Child& c = child_for(f.announcement());
        return c.ev->truth_plain(c.remap[w], f.body());
      }
    }
    throw Error("eval: bad node");
  }

  bool truth_ctx(int w, const Formula& f, const Formula& rho) {
    Key key{f, w, rho};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool v = compute_ctx(w, f, rho);
    memo_.emplace(std::move(key), v);
    return v;
  }

  // Successors of w surviving the context rho: (m,v) |=_top rho.
  WorldSet context_successors(int agent, int w, const Formula& rho) {
    WorldSet out;
    model().successors(agent, w).for_each([&](int v) {
      if (truth_ctx(v, rho, Formula::top())) out = out.with(v);
    });
    return out;
  }

  bool compute_ctx(int w, const Formula& f, const Formula& rho) {
    const KyModel& m = model();
    switch (f.kind()) {
      case Kind::Atom: {
        int i = m.atom_index(f.name());
        return i >= 0 && m.valuation(i).contains(w);
      }
      case Kind::Not:
        return !truth_ctx(w, f.operand(), rho);
      case Kind::And:
        return truth_ctx(w, f.lhs(), rho) && truth_ctx(w, f.rhs(), rho);
      case Kind::K: {
        bool all = true;
        context_successors(agent_of(f), w, rho).for_each([&](int v) {
          all = all && truth_ctx(v, f.body(), rho);
        });
        return all;
      }
      case Kind::Ky: {
        WorldSet s = context_successors(agent_of(f), w, rho);
        bool all = true;
        s.for_each([&](int v) { all = all && truth_ctx(v, f.body(), rho); });
        if (!all) return false;
        return s.empty() || covered(f.body(), s);
      }
      case Kind::KyR: {
        WorldSet live = context_successors(agent_of(f), w, rho);
        WorldSet s;
        live.for_each([&](int v) {
          if (truth_ctx(v, f.condition(), rho)) s = s.with(v);
        });
        bool all = true;
        s.for_each([&](int v) { all = all && truth_ctx(v, f.body(), rho); });
        if (!all) return false;
        return s.empty() || covered(f.body(), s);
      }
      case Kind::Announce: {
        if (!truth_ctx(w, f.announcement(), rho)) return true;
        return truth_ctx(w, f.body(), Formula::and_(rho, f.announcement()));
      }
    }
    throw Error("eval: bad node");
  }

  WorldSet constrained_successors(int w, const Formula& f) {
    const KyModel& m = model();
    int a = agent_of(f);
    if (sem_.kind == VariantKind::Context) {
      WorldSet live = context_successors(a, w, sem_.context);
      if (f.kind() == Kind::Ky) return live;
      WorldSet s;
      live.for_each([&](int v) {
        if (truth_ctx(v, f.condition(), sem_.context)) s = s.with(v);
      });
      return s;
    }
    WorldSet succ = m.successors(a, w);
    if (f.kind() == Kind::Ky) return succ;
    WorldSet s;
    succ.for_each([&](int v) {
      if (truth_plain(v, f.condition())) s = s.with(v);
    });
    return s;
  }

  bool covered(const Formula& body, WorldSet s) {
    for (const auto& e : table_.entries_at(body))
      if (s.subset_of(e.extent)) return true;
    return false;
  }

  int agent_of(const Formula& f) {
    int a = model().agent_index(f.agent());
    if (a < 0) throw Error("unknown agent '" + f.agent() + "'");
    return a;
  }
};

inline std::vector<Formula> eval_universe(const Formula& f, const Semantics& sem) {
  std::vector<Formula> out;
  FormulaSet seen;
  collect_query_relevant(f, out, seen);
  if (sem.kind == VariantKind::Context) collect_query_relevant(sem.context, out, seen);
  return out;
}

inline void require_evaluable(const Formula& f, const Semantics& sem) {
  // The alternative variant replaces only the Kyr clause; every other
  // operator (including Ky and announcements) keeps its standard reading, so
  // all four languages are evaluable under every variant.
  (void)f;
  (void)sem;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public evaluation API.

inline EvalResult eval(const KyModel& m, const std::string& world, const Formula& f,
                       const Semantics& sem = Semantics::standard()) {
  int w = m.world_index(world);
  if (w < 0) throw Error("unknown world '" + world + "'");
  detail::require_evaluable(f, sem);
  detail::Evaluator ev(m, sem, detail::eval_universe(f, sem));
  EvalResult r{ev.truth(w, f), std::nullopt};
  if (r.verdict && (f.kind() == Kind::Ky || f.kind() == Kind::KyR))
    r.witness = ev.witness_for(w, f);
  return r;
}

inline bool holds_globally(const KyModel& m, const Formula& f,
                           const Semantics& sem = Semantics::standard()) {
  detail::require_evaluable(f, sem);
  detail::Evaluator ev(m, sem, detail::eval_universe(f, sem));
  for (int w = 0; w < m.world_count(); ++w)
    if (!ev.truth(w, f)) return false;
  return true;
}

// Worlds of m satisfying f (STANDARD unless told otherwise).
inline WorldSet truth_set(const KyModel& m, const Formula& f,
                          const Semantics& sem = Semantics::standard()) {
  detail::require_evaluable(f, sem);
  detail::Evaluator ev(m, sem, detail::eval_universe(f, sem));
  return ev.truth_set(f);
}

// Verdict of every distinct subformula at `world`, children first — the
// transcript attached to countermodels.
inline std::vector<std::string> evaluation_trace(const KyModel& m, const std::string& world,
                                                 const Formula& f,
                                                 const Semantics& sem = Semantics::standard()) {
  int w = m.world_index(world);
  if (w < 0) throw Error("unknown world '" + world + "'");
  detail::require_evaluable(f, sem);
  detail::Evaluator ev(m, sem, detail::eval_universe(f, sem));
  std::vector<std::string> out;
  for (const auto& g : f.subformulas())
    out.push_back(print_formula(g) + "  @ " + world + "  =  " + (ev.truth(w, g) ? "true" : "false"));
  return out;
}

// ---------------------------------------------------------------------------
// Announcement update M|f: restriction to the (STANDARD) truth set of f.

inline KyModel update_model(const KyModel& m, const Formula& announced) {
  WorldSet keep = truth_set(m, announced);
  if (keep.empty())
    throw Error("announcement '" + print_formula(announced) + "' denotes the empty set; update undefined");
  return restrict_to(m, keep);
}

// ---------------------------------------------------------------------------
// Full validation: structural checks, then (if structurally sound) each
// tautology-ground formula must hold at every world.

inline std::vector<Violation> validate_model(const KyModel& m) {
  std::vector<Violation> out = structural_violations(m);
  if (!out.empty()) return out;
  for (const auto& lam : m.tautology_ground()) {
    try {
      detail::Evaluator ev(m, Semantics::standard(), detail::eval_universe(lam, Semantics::standard()));
      for (int w = 0; w < m.world_count(); ++w)
        if (!ev.truth(w, lam)) {
          out.push_back({ViolationKind::LambdaNotGlobal, "tautology-ground formula '" +
                                                             print_formula(lam) + "' is false at " +
                                                             m.worlds()[w]});
          break;
        }
    } catch (const Error& e) {
      out.push_back({ViolationKind::LambdaNotGlobal,
                     "tautology-ground formula '" + print_formula(lam) + "': " + e.what()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Factive companion: every explanation loses the worlds where its formula
// fails, i.e. entry extents become X ∩ [[f]]_m. Declared entries are
// transformed in place; additionally, every saturated entry whose factive
// restriction would otherwise be lost (not covered by any extent the
// transformed declarations regenerate) is appended as a declared entry. This
// keeps the induced table equal to the pointwise-restricted one, so truth of
// announcement-free formulas is unchanged (and the companion of a factive
// model is the model itself).

namespace detail {
// One evaluator able to answer truth sets for every declared formula of m
// (and everything the saturation closure can reach).
inline Evaluator declared_formula_evaluator(const KyModel& m) {
  std::vector<Formula> universe;
  FormulaSet seen;
  for (const auto& e : m.explanations()) collect_query_relevant(e.formula, universe, seen);
  for (const auto& f : m.tautology_ground()) collect_query_relevant(f, universe, seen);
  return Evaluator(m, Semantics::standard(), std::move(universe));
}
}  // namespace detail

inline bool is_factive(const KyModel& m) {
  detail::Evaluator ev = detail::declared_formula_evaluator(m);
  FormulaMap<WorldSet> truth;
  for (const auto& e : m.explanations()) {
    auto it = truth.find(e.formula);
    if (it == truth.end()) it = truth.emplace(e.formula, ev.truth_set(e.formula)).first;
    if (!e.extent.subset_of(it->second)) return false;
  }
  return true;
}

inline KyModel factive_companion(const KyModel& m) {
  detail::Evaluator ev = detail::declared_formula_evaluator(m);
  FormulaMap<WorldSet> truth;
  auto truth_of = [&](const Formula& f) {
    auto it = truth.find(f);
    if (it == truth.end()) it = truth.emplace(f, ev.truth_set(f)).first;
    return it->second;
  };

  KyModel c(m.worlds(), m.agents(), m.atoms());
  for (std::size_t a = 0; a < m.agents().size(); ++a)
    for (int w = 0; w < m.world_count(); ++w)
      c.set_successor_row(static_cast<int>(a), w, m.successors(static_cast<int>(a), w));
  for (const auto& atom : m.atoms()) c.set_valuation_mask(atom, m.valuation(atom));
  for (const auto& f : m.tautology_ground()) c.add_tautology(f);
  c.set_s5_required(m.s5_required());
  for (const auto& e : m.explanations())
    c.add_explanation(e.term, e.formula, e.extent & truth_of(e.formula));

  ExtentTable original = saturate(m);
  ExtentTable transformed = saturate(c);
  for (const auto& f : original.tracked_formulas()) {
    WorldSet tf = truth_of(f);
    for (const auto& e : original.entries_at(f)) {
      WorldSet goal = e.extent & tf;
      bool covered = false;
      for (const auto& t : transformed.entries_at(f))
        if (goal.subset_of(t.extent)) {
          covered = true;
          break;
        }
      if (!covered)
        for (const auto& prior : c.explanations())
          if (prior.formula == f && goal.subset_of(prior.extent)) {
            covered = true;
            break;
          }
      if (!covered) c.add_explanation(e.term, f, goal);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Correspondence probe: compares [cond]Ky_a body against cond -> Kyr_a(cond,
// body) under STANDARD, and the same pair with the right side under ALT_KYR.

struct CorrespondenceReport {
  bool announced_ky;   // [cond]Ky{a}body, STANDARD
  bool kyr_standard;   // Kyr{a}(cond, body), STANDARD
  bool kyr_alt;        // cond -> Kyr{a}(cond, body), ALT_KYR
  bool standard_pair_agrees;
  bool alt_pair_agrees;
};

inline CorrespondenceReport check_correspondence(const KyModel& m, const std::string& world,
                                                 const std::string& agent, const Formula& cond,
                                                 const Formula& body) {
  // The standard comparison pits the announcement against the bare
  // conditional operator; the alternative variant instead gets the guarded
  // translation cond -> Kyr(cond, body), which is the form it validates.
  Formula announced = Formula::announce(cond, Formula::ky(agent, body));
  Formula bare = Formula::kyr(agent, cond, body);
  Formula guarded = Formula::implies(cond, Formula::kyr(agent, cond, body));
  CorrespondenceReport r{};
  r.announced_ky = eval(m, world, announced).verdict;
  r.kyr_standard = eval(m, world, bare).verdict;
  r.kyr_alt = eval(m, world, guarded, Semantics::alt_kyr()).verdict;
  r.standard_pair_agrees = (r.announced_ky == r.kyr_standard);
  r.alt_pair_agrees = (r.announced_ky == r.kyr_alt);
  return r;
}

}  // namespace kywhy
