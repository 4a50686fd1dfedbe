#pragma once

// Bounded model search: exhaustive enumeration of explanation-equipped models
// (S5 frames as set partitions via restricted-growth strings, or arbitrary
// relations with the s5 flag off), countermodel search, equivalence checking
// and seeded random sampling.
//
// Enumeration order (deterministic): for each agent a partition/relation
// (outermost), then one valuation mask per atom, then one extent family per
// target formula (innermost). Extent families are the subsets of 2^W of size
// <= max_extents_per_formula in (size, lexicographic) order, attached to
// fresh base terms x<i>_<j>.
//
// find_countermodel walks world counts 1..max_worlds ascending and returns the
// first (model, world) refuting the formula. Announcement-free STANDARD
// queries run through a compiled mask evaluator; every hit is re-checked with
// the reference evaluator before being reported.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "semantics.hpp"

namespace kywhy {

struct SearchBounds {
  int max_worlds = 3;
  std::vector<std::string> agents;  // empty: derived from the query (or "a")
  std::vector<std::string> atoms;   // empty: derived from the query
  int max_extents_per_formula = 2;
  bool s5_frames = true;            // false: arbitrary relations, s5 flag off
  std::uint64_t max_models = ~0ull;
};

namespace detail {

// --- restricted growth strings -> set partitions ---------------------------

inline std::vector<int> first_rgs(int n) { return std::vector<int>(n, 0); }

inline bool next_rgs(std::vector<int>& a) {
  int n = static_cast<int>(a.size());
  for (int i = n - 1; i >= 1; --i) {
    int max_prefix = 0;
    for (int j = 0; j < i; ++j) max_prefix = std::max(max_prefix, a[j]);
    if (a[i] <= max_prefix && a[i] < n - 1) {
      ++a[i];
      for (int j = i + 1; j < n; ++j) a[j] = 0;
      return true;
    }
  }
  return false;
}

inline void rgs_to_rows(const std::vector<int>& a, std::vector<WorldSet>& rows) {
  int n = static_cast<int>(a.size());
  WorldSet block[64];
  for (int i = 0; i < n; ++i) block[a[i]] = block[a[i]].with(i);
  for (int i = 0; i < n; ++i) rows[i] = block[a[i]];
}

inline void bits_to_rows(std::uint64_t bits, int n, std::vector<WorldSet>& rows) {
  for (int w = 0; w < n; ++w) {
    WorldSet r;
    for (int v = 0; v < n; ++v)
      if ((bits >> (w * n + v)) & 1) r = r.with(v);
    rows[w] = r;
  }
}

// --- the candidate stream ---------------------------------------------------

struct ExtentFamily {
  int size = 0;
  std::vector<int> masks;  // current combination, ascending, first `size` used
};

class ModelEnumerator {
 public:
  // Which (coarsest) dimension changed in the last next(): 0 = extent
  // families only, 1 = valuation, 2 = relations (or first candidate).
  enum { ChangedFamilies = 0, ChangedValuation = 1, ChangedRelations = 2 };

  ModelEnumerator(const SearchBounds& b, std::vector<Formula> targets, int worlds)
      : n_(worlds), bounds_(b), targets_(std::move(targets)) {
    if (n_ < 1 || n_ > 6) throw Error("enumeration supports 1..6 worlds");
    if (bounds_.max_extents_per_formula < 0) throw Error("bounds must be positive");
    extent_cap_ = std::min(bounds_.max_extents_per_formula, 1 << n_);
    for (int i = 1; i <= n_; ++i) world_names_.push_back("w" + std::to_string(i));
    rows_.assign(bounds_.agents.size(), std::vector<WorldSet>(n_));
    if (bounds_.s5_frames) {
      rgs_.assign(bounds_.agents.size(), first_rgs(n_));
      for (std::size_t a = 0; a < rows_.size(); ++a) rgs_to_rows(rgs_[a], rows_[a]);
    } else {
      relbits_.assign(bounds_.agents.size(), 0);
      for (std::size_t a = 0; a < rows_.size(); ++a) bits_to_rows(0, n_, rows_[a]);
    }
    val_.assign(bounds_.atoms.size(), WorldSet());
    fams_.assign(targets_.size(), ExtentFamily{});
    for (std::size_t i = 0; i < targets_.size(); ++i)
      for (std::size_t j = 0; j < static_cast<std::size_t>(extent_cap_); ++j)
        slot_terms_.push_back(ExplanationTerm::base("x" + std::to_string(i) + "_" + std::to_string(j)));
  }

  int world_count() const { return n_; }
  const std::vector<std::string>& world_names() const { return world_names_; }
  const std::vector<Formula>& targets() const { return targets_; }
  const std::vector<std::vector<WorldSet>>& rows() const { return rows_; }
  const std::vector<WorldSet>& valuation_masks() const { return val_; }
  const std::vector<ExtentFamily>& families() const { return fams_; }
  int changed_level() const { return changed_; }

  bool next() {
    if (first_) {
      first_ = false;
      changed_ = ChangedRelations;
      return true;
    }
    if (advance_families()) {
      changed_ = ChangedFamilies;
      return true;
    }
    if (advance_valuation()) {
      changed_ = ChangedValuation;
      return true;
    }
    if (advance_relations()) {
      changed_ = ChangedRelations;
      return true;
    }
    return false;
  }

  // Materializes the current candidate as a KyModel.
  KyModel current() const {
    KyModel m(world_names_, bounds_.agents, bounds_.atoms);
    for (std::size_t a = 0; a < rows_.size(); ++a)
      for (int w = 0; w < n_; ++w) m.set_successor_row(static_cast<int>(a), w, rows_[a][w]);
    for (std::size_t i = 0; i < val_.size(); ++i) m.set_valuation_mask(bounds_.atoms[i], val_[i]);
    for (std::size_t i = 0; i < fams_.size(); ++i)
      for (int j = 0; j < fams_[i].size; ++j)
        m.add_explanation(slot_terms_[i * extent_cap_ + j], targets_[i],
                          WorldSet(static_cast<std::uint64_t>(fams_[i].masks[j])));
    m.set_s5_required(bounds_.s5_frames);
    return m;
  }

 private:
  int n_;
  SearchBounds bounds_;
  std::vector<Formula> targets_;
  std::vector<std::string> world_names_;
  std::vector<ExplanationTerm> slot_terms_;
  int extent_cap_ = 0;

  std::vector<std::vector<int>> rgs_;
  std::vector<std::uint64_t> relbits_;
  std::vector<std::vector<WorldSet>> rows_;
  std::vector<WorldSet> val_;
  std::vector<ExtentFamily> fams_;
  bool first_ = true;
  int changed_ = ChangedRelations;

  int mask_count() const { return 1 << n_; }

  // next family for formula i; false on wrap-around to the initial family
  bool advance_family(ExtentFamily& f) {
    if (f.size > 0) {
      // next lexicographic combination of `size` distinct masks
      int e = mask_count();
      for (int j = f.size - 1; j >= 0; --j) {
        int limit = e - (f.size - j);
        if (f.masks[j] < limit) {
          ++f.masks[j];
          for (int l = j + 1; l < f.size; ++l) f.masks[l] = f.masks[l - 1] + 1;
          return true;
        }
      }
    }
    if (f.size < extent_cap_) {
      ++f.size;
      f.masks.resize(f.size);
      for (int j = 0; j < f.size; ++j) f.masks[j] = j;
      return true;
    }
    f.size = 0;
    f.masks.clear();
    return false;
  }

  bool advance_families() {
    for (int i = static_cast<int>(fams_.size()) - 1; i >= 0; --i)
      if (advance_family(fams_[i])) return true;
    return false;  // all wrapped to initial
  }

  bool advance_valuation() {
    for (int i = static_cast<int>(val_.size()) - 1; i >= 0; --i) {
      if (val_[i].bits() + 1 < static_cast<std::uint64_t>(mask_count())) {
        val_[i] = WorldSet(val_[i].bits() + 1);
        for (std::size_t j = i + 1; j < val_.size(); ++j) val_[j] = WorldSet();
        return true;
      }
    }
    for (auto& v : val_) v = WorldSet();
    return false;
  }

  bool advance_relations() {
    for (int a = static_cast<int>(rows_.size()) - 1; a >= 0; --a) {
      if (bounds_.s5_frames) {
        if (next_rgs(rgs_[a])) {
          rgs_to_rows(rgs_[a], rows_[a]);
          for (std::size_t j = a + 1; j < rows_.size(); ++j) {
            rgs_[j] = first_rgs(n_);
            rgs_to_rows(rgs_[j], rows_[j]);
          }
          return true;
        }
      } else {
        if (relbits_[a] + 1 < (1ull << (n_ * n_))) {
          ++relbits_[a];
          bits_to_rows(relbits_[a], n_, rows_[a]);
          for (std::size_t j = a + 1; j < rows_.size(); ++j) {
            relbits_[j] = 0;
            bits_to_rows(0, n_, rows_[j]);
          }
          return true;
        }
      }
    }
    return false;
  }
};

// --- compiled mask evaluator for announcement-free STANDARD queries --------

struct SweepProgram {
  struct Op {
    Kind kind;
    int a = -1, b = -1;  // child op indices
    int agent = -1;      // K/Ky/KyR
    int atom = -1;       // Atom (-1: not in the search vocabulary, always false)
    int tracked = -1;    // Ky/KyR body slot
  };
  std::vector<Op> ops;  // postorder: children precede parents
  int root = -1;
  std::vector<Formula> tracked;  // targets plus implication closure
  struct Link {
    int imp, ant, con;
  };
  std::vector<Link> links;
  std::vector<int> target_slot;    // targets[i] -> tracked slot
  std::vector<char> dynamic;       // op transitively depends on extents
  std::vector<int> dynamic_ops;    // indices of dynamic ops, ascending
};

inline bool sweep_supported(const Formula& f, const Semantics& sem) {
  return sem.kind == VariantKind::Standard && !f.contains(Kind::Announce);
}

inline SweepProgram compile_sweep(const Formula& f, const std::vector<std::string>& atoms,
                                  const std::vector<std::string>& agents,
                                  const std::vector<Formula>& targets) {
  SweepProgram p;
  // tracked = targets (deduplicated) closed under implication decomposition
  FormulaSet seen;
  for (const auto& t : targets)
    if (seen.insert(t).second) p.tracked.push_back(t);
  for (const auto& t : targets)
    for (std::size_t i = 0; i < p.tracked.size(); ++i)
      if (p.tracked[i] == t) {
        p.target_slot.push_back(static_cast<int>(i));
        break;
      }
  close_under_implication(p.tracked, seen);
  FormulaMap<int> slot;
  for (std::size_t i = 0; i < p.tracked.size(); ++i) slot.emplace(p.tracked[i], static_cast<int>(i));
  for (std::size_t i = 0; i < p.tracked.size(); ++i) {
    auto imp = p.tracked[i].as_implication();
    if (!imp) continue;
    auto a = slot.find(imp->first);
    auto c = slot.find(imp->second);
    if (a != slot.end() && c != slot.end())
      p.links.push_back({static_cast<int>(i), a->second, c->second});
  }

  auto atom_idx = [&](const std::string& name) {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i] == name) return static_cast<int>(i);
    return -1;
  };
  auto agent_idx = [&](const std::string& name) {
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (agents[i] == name) return static_cast<int>(i);
    throw Error("search bounds do not cover agent '" + name + "'");
  };

  FormulaMap<int> op_of;
  for (const auto& g : f.subformulas()) {
    SweepProgram::Op op;
    op.kind = g.kind();
    switch (g.kind()) {
      case Kind::Atom:
        op.atom = atom_idx(g.name());
        break;
      case Kind::Not:
        op.a = op_of.at(g.operand());
        break;
      case Kind::And:
        op.a = op_of.at(g.lhs());
        op.b = op_of.at(g.rhs());
        break;
      case Kind::K:
        op.agent = agent_idx(g.agent());
        op.a = op_of.at(g.body());
        break;
      case Kind::Ky:
        op.agent = agent_idx(g.agent());
        op.a = op_of.at(g.body());
        op.tracked = slot.at(g.body());
        break;
      case Kind::KyR:
        op.agent = agent_idx(g.agent());
        op.a = op_of.at(g.condition());
        op.b = op_of.at(g.body());
        op.tracked = slot.at(g.body());
        break;
      case Kind::Announce:
        throw Error("sweep compiler: announcements unsupported");
    }
    op_of.emplace(g, static_cast<int>(p.ops.size()));
    p.ops.push_back(op);
  }
  p.root = static_cast<int>(p.ops.size()) - 1;

  p.dynamic.assign(p.ops.size(), 0);
  for (std::size_t i = 0; i < p.ops.size(); ++i) {
    const auto& op = p.ops[i];
    bool dyn = op.kind == Kind::Ky || op.kind == Kind::KyR;
    if (op.a >= 0) dyn = dyn || p.dynamic[op.a];
    if (op.b >= 0) dyn = dyn || p.dynamic[op.b];
    p.dynamic[i] = dyn ? 1 : 0;
    if (dyn) p.dynamic_ops.push_back(static_cast<int>(i));
  }
  return p;
}

// Scratch state for running a SweepProgram over a candidate stream.
class SweepRunner {
 public:
  SweepRunner(const SweepProgram& p, int worlds) : p_(p), n_(worlds) {
    masks_.assign(p.ops.size(), 0);
    extents_.assign(p.tracked.size(), {});
  }

  // Returns the worlds where the formula holds. `level` is the enumerator's
  // changed_level(): relation/valuation changes recompute everything, family
  // changes only the extent-dependent cone.
  std::uint64_t run(const ModelEnumerator& e, int level) {
    rebuild_extents(e);
    std::uint64_t full = WorldSet::full(n_).bits();
    if (level >= ModelEnumerator::ChangedValuation) {
      for (std::size_t i = 0; i < p_.ops.size(); ++i) eval_op(static_cast<int>(i), e, full);
    } else {
      for (int i : p_.dynamic_ops) eval_op(i, e, full);
    }
    return masks_[p_.root];
  }

 private:
  const SweepProgram& p_;
  int n_;
  std::vector<std::uint64_t> masks_;
  std::vector<std::vector<std::uint64_t>> extents_;

  void rebuild_extents(const ModelEnumerator& e) {
    for (auto& v : extents_) v.clear();
    const auto& fams = e.families();
    for (std::size_t i = 0; i < fams.size(); ++i) {
      auto& dst = extents_[p_.target_slot[i]];
      for (int j = 0; j < fams[i].size; ++j) {
        std::uint64_t m = static_cast<std::uint64_t>(fams[i].masks[j]);
        if (std::find(dst.begin(), dst.end(), m) == dst.end()) dst.push_back(m);
      }
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& link : p_.links) {
        std::size_t ni = extents_[link.imp].size(), na = extents_[link.ant].size();
        for (std::size_t x = 0; x < ni; ++x)
          for (std::size_t y = 0; y < na; ++y) {
            std::uint64_t z = extents_[link.imp][x] & extents_[link.ant][y];
            auto& dst = extents_[link.con];
            if (std::find(dst.begin(), dst.end(), z) == dst.end()) {
              dst.push_back(z);
              changed = true;
            }
          }
      }
    }
  }

  static bool covered(const std::vector<std::uint64_t>& exts, std::uint64_t s) {
    for (std::uint64_t x : exts)
      if ((s & ~x) == 0) return true;
    return false;
  }

  void eval_op(int i, const ModelEnumerator& e, std::uint64_t full) {
    const auto& op = p_.ops[i];
    switch (op.kind) {
      case Kind::Atom:
        masks_[i] = op.atom < 0 ? 0 : e.valuation_masks()[op.atom].bits();
        break;
      case Kind::Not:
        masks_[i] = ~masks_[op.a] & full;
        break;
      case Kind::And:
        masks_[i] = masks_[op.a] & masks_[op.b];
        break;
      case Kind::K: {
        std::uint64_t body = masks_[op.a], out = 0;
        const auto& rows = e.rows()[op.agent];
        for (int w = 0; w < n_; ++w)
          if ((rows[w].bits() & ~body) == 0) out |= 1ull << w;
        masks_[i] = out;
        break;
      }
      case Kind::Ky: {
        std::uint64_t body = masks_[op.a], out = 0;
        const auto& rows = e.rows()[op.agent];
        const auto& exts = extents_[op.tracked];
        for (int w = 0; w < n_; ++w) {
          std::uint64_t s = rows[w].bits();
          if ((s & ~body) == 0 && (s == 0 || covered(exts, s))) out |= 1ull << w;
        }
        masks_[i] = out;
        break;
      }
      case Kind::KyR: {
        std::uint64_t cond = masks_[op.a], body = masks_[op.b], out = 0;
        const auto& rows = e.rows()[op.agent];
        const auto& exts = extents_[op.tracked];
        for (int w = 0; w < n_; ++w) {
          std::uint64_t s = rows[w].bits() & cond;
          if ((s & ~body) == 0 && (s == 0 || covered(exts, s))) out |= 1ull << w;
        }
        masks_[i] = out;
        break;
      }
      case Kind::Announce:
        throw Error("sweep runner: announcements unsupported");
    }
  }
};

inline SearchBounds resolve_bounds(const SearchBounds& b, const Formula& f) {
  SearchBounds r = b;
  if (r.max_worlds < 1) throw Error("bounds must be positive");
  std::vector<std::string> fatoms = f.atom_names();
  std::vector<std::string> fagents = f.agent_names();
  if (r.atoms.empty()) {
    r.atoms = fatoms;
  } else {
    for (const auto& a : fatoms)
      if (std::find(r.atoms.begin(), r.atoms.end(), a) == r.atoms.end())
        throw Error("search bounds do not cover atom '" + a + "'");
  }
  if (r.agents.empty()) {
    r.agents = fagents.empty() ? std::vector<std::string>{"a"} : fagents;
  } else {
    for (const auto& a : fagents)
      if (std::find(r.agents.begin(), r.agents.end(), a) == r.agents.end())
        throw Error("search bounds do not cover agent '" + a + "'");
  }
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public search API.

// Every model with exactly b.max_worlds worlds within the bounds, extent
// families drawn over the given target formulas (capped at b.max_models).
inline std::vector<KyModel> enumerate_models(const SearchBounds& bounds,
                                             const std::vector<Formula>& extent_targets = {}) {
  SearchBounds b = bounds;
  if (b.agents.empty()) b.agents = {"a"};
  std::vector<KyModel> out;
  detail::ModelEnumerator e(b, extent_targets, b.max_worlds);
  while (e.next()) {
    if (out.size() >= b.max_models) break;
    out.push_back(e.current());
  }
  return out;
}

struct Countermodel {
  KyModel model;
  std::string world;
  std::vector<std::string> transcript;
};

inline std::optional<Countermodel> find_countermodel(const Formula& f,
                                                     const Semantics& sem = Semantics::standard(),
                                                     const SearchBounds& bounds = {}) {
  detail::require_evaluable(f, sem);
  SearchBounds b = detail::resolve_bounds(bounds, f);
  std::vector<Formula> targets = extent_target_formulas(f);
  if (sem.kind == VariantKind::Context)
    for (const auto& t : extent_target_formulas(sem.context))
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);

  bool fast = detail::sweep_supported(f, sem);
  std::optional<detail::SweepProgram> program;
  if (fast) program = detail::compile_sweep(f, b.atoms, b.agents, targets);

  std::uint64_t generated = 0;
  for (int n = 1; n <= b.max_worlds; ++n) {
    detail::ModelEnumerator e(b, targets, n);
    if (fast) {
      detail::SweepRunner runner(*program, n);
      std::uint64_t full = WorldSet::full(n).bits();
      while (e.next()) {
        if (generated++ >= b.max_models) return std::nullopt;
        std::uint64_t holds = runner.run(e, e.changed_level());
        if (holds != full) {
          int w = std::countr_zero(~holds & full);
          KyModel m = e.current();
          std::string world = m.worlds()[w];
          if (eval(m, world, f, sem).verdict)
            throw Error("internal: sweep and reference evaluator disagree");
          std::vector<std::string> transcript = evaluation_trace(m, world, f, sem);
          return Countermodel{std::move(m), world, std::move(transcript)};
        }
      }
    } else {
      while (e.next()) {
        if (generated++ >= b.max_models) return std::nullopt;
        KyModel m = e.current();
        detail::Evaluator ev(m, sem, detail::eval_universe(f, sem));
        for (int w = 0; w < n; ++w)
          if (!ev.truth(w, f)) {
            std::string world = m.worlds()[w];
            std::vector<std::string> transcript = evaluation_trace(m, world, f, sem);
            return Countermodel{std::move(m), world, std::move(transcript)};
          }
      }
    }
  }
  return std::nullopt;
}

struct EquivalenceVerdict {
  bool equivalent;  // within the bounds
  std::optional<Countermodel> witness;
};

inline EquivalenceVerdict check_equivalence(const Formula& f, const Formula& g,
                                            const Semantics& sem = Semantics::standard(),
                                            const SearchBounds& bounds = {}) {
  auto cm = find_countermodel(Formula::iff(f, g), sem, bounds);
  if (cm) return {false, std::move(cm)};
  return {true, std::nullopt};
}

// Seeded random models within the bounds (world count 1..max_worlds). Extent
// families are attached to the target formulas. Deterministic for a fixed
// (bounds, seed, count, targets) tuple.
inline std::vector<KyModel> sample_models(const SearchBounds& bounds, std::uint64_t seed, int count,
                                          const std::vector<Formula>& extent_targets = {}) {
  SearchBounds b = bounds;
  if (b.agents.empty()) b.agents = {"a"};
  if (b.max_worlds < 1 || b.max_worlds > 64) throw Error("bounds must be positive (worlds 1..64)");
  std::mt19937_64 rng(seed);
  auto below = [&](std::uint64_t m) { return m == 0 ? 0 : static_cast<int>(rng() % m); };

  std::vector<KyModel> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    int n = 1 + below(b.max_worlds);
    std::vector<std::string> worlds;
    for (int w = 1; w <= n; ++w) worlds.push_back("w" + std::to_string(w));
    KyModel m(worlds, b.agents, b.atoms);
    std::uint64_t full = WorldSet::full(n).bits();
    for (std::size_t a = 0; a < b.agents.size(); ++a) {
      if (b.s5_frames) {
        std::vector<int> rgs(n, 0);
        int mx = 0;
        for (int w = 1; w < n; ++w) {
          rgs[w] = below(mx + 2);
          mx = std::max(mx, rgs[w]);
        }
        std::vector<WorldSet> rows(n);
        detail::rgs_to_rows(rgs, rows);
        for (int w = 0; w < n; ++w) m.set_successor_row(static_cast<int>(a), w, rows[w]);
      } else {
        for (int w = 0; w < n; ++w)
          m.set_successor_row(static_cast<int>(a), w, WorldSet(rng() & full));
      }
    }
    for (const auto& atom : b.atoms) m.set_valuation_mask(atom, WorldSet(rng() & full));
    int cap = std::min(b.max_extents_per_formula, 1 << n);
    for (std::size_t t = 0; t < extent_targets.size(); ++t) {
      int size = below(cap + 1);
      std::vector<std::uint64_t> chosen;
      for (int j = 0; j < size; ++j) {
        std::uint64_t mask = rng() & full;
        for (int tries = 0; tries < 16 && std::find(chosen.begin(), chosen.end(), mask) != chosen.end();
             ++tries)
          mask = rng() & full;
        if (std::find(chosen.begin(), chosen.end(), mask) != chosen.end()) continue;
        chosen.push_back(mask);
        m.add_explanation(ExplanationTerm::base("x" + std::to_string(t) + "_" + std::to_string(j)),
                          extent_targets[t], WorldSet(mask));
      }
    }
    m.set_s5_required(b.s5_frames);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace kywhy
