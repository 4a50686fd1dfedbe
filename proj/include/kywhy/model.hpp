#pragma once

// Explanation-equipped Kripke models and explanation tables.
//
// A KyModel is <W, E, {R_a}, Ecal, V> over at most 64 worlds (world sets are
// bitmasks). Explanation content is stored as declared entries
// (term, formula, extent); the full table Ecal is realized lazily as the least
// family closed under the MP condition
//     Ecal(s, f->g)  ∩  Ecal(t, f)   ⊆   Ecal(s.t, g)
// and containing (e, lam, W) for every tautology-ground formula lam — see
// saturate(). Operations that need formula truth sets (validate_model,
// update_model, factive_companion, is_factive) live in semantics.hpp.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "formula.hpp"
#include "parser.hpp"
#include "term.hpp"

namespace kywhy {

// ---------------------------------------------------------------------------
// WorldSet: subset of worlds as a bitmask, indices 0..63.

class WorldSet {
 public:
  constexpr WorldSet() = default;
  constexpr explicit WorldSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr WorldSet full(int n) {
    return WorldSet(n >= 64 ? ~0ull : ((1ull << n) - 1));
  }
  static constexpr WorldSet single(int i) { return WorldSet(1ull << i); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1; }
  constexpr WorldSet with(int i) const { return WorldSet(bits_ | (1ull << i)); }
  constexpr WorldSet without(int i) const { return WorldSet(bits_ & ~(1ull << i)); }
  constexpr bool subset_of(WorldSet o) const { return (bits_ & ~o.bits_) == 0; }
  int count() const { return __builtin_popcountll(bits_); }

  friend constexpr WorldSet operator&(WorldSet a, WorldSet b) { return WorldSet(a.bits_ & b.bits_); }
  friend constexpr WorldSet operator|(WorldSet a, WorldSet b) { return WorldSet(a.bits_ | b.bits_); }
  friend constexpr bool operator==(WorldSet a, WorldSet b) { return a.bits_ == b.bits_; }
  friend constexpr bool operator!=(WorldSet a, WorldSet b) { return a.bits_ != b.bits_; }

  template <class Fn>
  void for_each(Fn&& fn) const {
    std::uint64_t b = bits_;
    while (b) {
      int i = __builtin_ctzll(b);
      fn(i);
      b &= b - 1;
    }
  }

 private:
  std::uint64_t bits_ = 0;
};

struct ExplanationEntry {
  ExplanationTerm term;
  Formula formula;
  WorldSet extent;
  friend bool operator==(const ExplanationEntry& a, const ExplanationEntry& b) {
    return a.term == b.term && a.formula == b.formula && a.extent == b.extent;
  }
};

// ---------------------------------------------------------------------------
// KyModel. Construct, populate via the add_*/set_* calls, then treat as
// immutable: every operation takes models by const reference and returns
// fresh ones.

class KyModel {
 public:
  KyModel(std::vector<std::string> worlds, std::vector<std::string> agents,
          std::vector<std::string> atoms)
      : worlds_(std::move(worlds)), agents_(std::move(agents)), atoms_(std::move(atoms)) {
    if (worlds_.empty()) throw Error("model needs at least one world");
    if (worlds_.size() > 64) throw Error("models are capped at 64 worlds");
    if (agents_.empty()) throw Error("model needs at least one agent");
    for (std::size_t i = 0; i < worlds_.size(); ++i) world_index_[worlds_[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < agents_.size(); ++i) agent_index_[agents_[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < atoms_.size(); ++i) atom_index_[atoms_[i]] = static_cast<int>(i);
    succ_.assign(agents_.size(), std::vector<WorldSet>(worlds_.size()));
    val_.assign(atoms_.size(), WorldSet());
  }

  int world_count() const { return static_cast<int>(worlds_.size()); }
  const std::vector<std::string>& worlds() const { return worlds_; }
  const std::vector<std::string>& agents() const { return agents_; }
  const std::vector<std::string>& atoms() const { return atoms_; }
  WorldSet full() const { return WorldSet::full(world_count()); }

  int world_index(const std::string& id) const {
    auto it = world_index_.find(id);
    return it == world_index_.end() ? -1 : it->second;
  }
  int agent_index(const std::string& id) const {
    auto it = agent_index_.find(id);
    return it == agent_index_.end() ? -1 : it->second;
  }
  int atom_index(const std::string& id) const {
    auto it = atom_index_.find(id);
    return it == atom_index_.end() ? -1 : it->second;
  }

  WorldSet world_set(const std::vector<std::string>& ids) const {
    WorldSet s;
    for (const auto& id : ids) {
      int i = world_index(id);
      if (i < 0) throw Error("unknown world '" + id + "'");
      s = s.with(i);
    }
    return s;
  }
  std::vector<std::string> world_ids(WorldSet s) const {
    std::vector<std::string> out;
    s.for_each([&](int i) { out.push_back(worlds_[i]); });
    return out;
  }

  // relations
  void add_edge(const std::string& agent, const std::string& from, const std::string& to) {
    int a = agent_index(agent), w = world_index(from), v = world_index(to);
    if (a < 0) throw Error("unknown agent '" + agent + "'");
    if (w < 0) throw Error("unknown world '" + from + "'");
    if (v < 0) throw Error("unknown world '" + to + "'");
    succ_[a][w] = succ_[a][w].with(v);
  }
  void set_total(const std::string& agent) {
    int a = agent_index(agent);
    if (a < 0) throw Error("unknown agent '" + agent + "'");
    for (auto& row : succ_[a]) row = full();
  }
  WorldSet successors(int agent, int world) const { return succ_[agent][world]; }
  const std::vector<WorldSet>& successor_rows(int agent) const { return succ_[agent]; }
  void set_successor_row(int agent, int world, WorldSet row) { succ_[agent][world] = row; }

  // valuation
  void set_valuation(const std::string& atom, const std::vector<std::string>& ids) {
    set_valuation_mask(atom, world_set(ids));
  }
  void set_valuation_mask(const std::string& atom, WorldSet s) {
    int i = atom_index(atom);
    if (i < 0) throw Error("unknown atom '" + atom + "'");
    val_[i] = s;
  }
  WorldSet valuation(int atom) const { return val_[atom]; }
  WorldSet valuation(const std::string& atom) const {
    int i = atom_index(atom);
    return i < 0 ? WorldSet() : val_[i];  // unknown atoms denote the empty set
  }

  // explanation entries
  void add_explanation(ExplanationTerm t, Formula f, WorldSet extent) {
    entries_.push_back(ExplanationEntry{std::move(t), std::move(f), extent});
  }
  void add_explanation(ExplanationTerm t, Formula f, const std::vector<std::string>& ids) {
    add_explanation(std::move(t), std::move(f), world_set(ids));
  }
  const std::vector<ExplanationEntry>& explanations() const { return entries_; }
  void clear_explanations() { entries_.clear(); }

  // tautology ground
  void add_tautology(Formula f) { lambda_.push_back(std::move(f)); }
  const std::vector<Formula>& tautology_ground() const { return lambda_; }

  bool s5_required() const { return s5_required_; }
  void set_s5_required(bool b) { s5_required_ = b; }

  friend bool operator==(const KyModel& a, const KyModel& b) {
    return a.worlds_ == b.worlds_ && a.agents_ == b.agents_ && a.atoms_ == b.atoms_ &&
           a.succ_ == b.succ_ && a.val_ == b.val_ && a.entries_ == b.entries_ &&
           a.lambda_ == b.lambda_ && a.s5_required_ == b.s5_required_;
  }
  friend bool operator!=(const KyModel& a, const KyModel& b) { return !(a == b); }

 private:
  std::vector<std::string> worlds_, agents_, atoms_;
  std::map<std::string, int> world_index_, agent_index_, atom_index_;
  std::vector<std::vector<WorldSet>> succ_;  // [agent][world] -> successor mask
  std::vector<WorldSet> val_;                // [atom] -> worlds where true
  std::vector<ExplanationEntry> entries_;
  std::vector<Formula> lambda_;
  bool s5_required_ = true;
};

// Restriction of m to a nonempty subset of worlds: relations/valuation/extents
// intersected, world ids kept in their original order, E, Λ and the s5 flag
// unchanged. This is the model surgery behind announcement update.
inline KyModel restrict_to(const KyModel& m, WorldSet keep) {
  if (keep.empty()) throw Error("restriction to the empty set of worlds");
  std::vector<std::string> worlds;
  std::vector<int> new_index(m.world_count(), -1);
  keep.for_each([&](int i) {
    new_index[i] = static_cast<int>(worlds.size());
    worlds.push_back(m.worlds()[i]);
  });
  auto compress = [&](WorldSet s) {
    WorldSet out;
    (s & keep).for_each([&](int i) { out = out.with(new_index[i]); });
    return out;
  };
  KyModel r(worlds, m.agents(), m.atoms());
  for (std::size_t a = 0; a < m.agents().size(); ++a)
    keep.for_each([&](int w) {
      r.set_successor_row(static_cast<int>(a), new_index[w],
                          compress(m.successors(static_cast<int>(a), w)));
    });
  for (const auto& atom : m.atoms()) r.set_valuation_mask(atom, compress(m.valuation(atom)));
  for (const auto& e : m.explanations()) r.add_explanation(e.term, e.formula, compress(e.extent));
  for (const auto& f : m.tautology_ground()) r.add_tautology(f);
  r.set_s5_required(m.s5_required());
  return r;
}

// ---------------------------------------------------------------------------
// Tracked-formula collection. The table only answers extent queries for
// tracked formulas: the tautology ground, the declared-entry formulas, the
// bodies and conditions of Ky/Ky^r operators in the queries, all closed under
// "if f->g and f are tracked then g is tracked".

inline void collect_query_relevant(const Formula& f, std::vector<Formula>& out, FormulaSet& seen) {
  auto add = [&](const Formula& g) {
    if (seen.insert(g).second) out.push_back(g);
  };
  f.visit([&](const Formula& g) {
    if (g.kind() == Kind::Ky) add(g.body());
    if (g.kind() == Kind::KyR) {
      add(g.condition());
      add(g.body());
    }
  });
}

inline std::vector<Formula> query_relevant_formulas(const Formula& f) {
  std::vector<Formula> out;
  FormulaSet seen;
  collect_query_relevant(f, out, seen);
  return out;
}

// Ky/Ky^r bodies only — the formulas that receive extent families in search.
inline std::vector<Formula> extent_target_formulas(const Formula& f) {
  std::vector<Formula> out;
  FormulaSet seen;
  f.visit([&](const Formula& g) {
    if ((g.kind() == Kind::Ky || g.kind() == Kind::KyR) && seen.insert(g.body()).second)
      out.push_back(g.body());
  });
  return out;
}

inline void close_under_implication(std::vector<Formula>& tracked, FormulaSet& seen) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      auto imp = tracked[i].as_implication();
      if (!imp) continue;
      if (seen.count(imp->first) && !seen.count(imp->second)) {
        seen.insert(imp->second);
        tracked.push_back(imp->second);
        changed = true;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// ExtentTable: the saturated least explanation table of a model over a set of
// tracked formulas.

class ExtentTable {
 public:
  bool tracked(const Formula& f) const { return index_.count(f) != 0; }
  const std::vector<Formula>& tracked_formulas() const { return formulas_; }

  const std::vector<ExplanationEntry>& entries_at(const Formula& f) const {
    auto it = index_.find(f);
    if (it == index_.end())
      throw Error("extent query for untracked formula '" + print_formula(f) + "'");
    return entries_[it->second];
  }

  // Distinct extents recorded at f, in first-derivation order.
  std::vector<WorldSet> extents_of(const Formula& f) const {
    std::vector<WorldSet> out;
    for (const auto& e : entries_at(f))
      if (std::find(out.begin(), out.end(), e.extent) == out.end()) out.push_back(e.extent);
    return out;
  }

  std::size_t entry_count() const {
    std::size_t n = 0;
    for (const auto& v : entries_) n += v.size();
    return n;
  }

 private:
  friend ExtentTable saturate(const KyModel&, const std::vector<Formula>&);

  std::vector<Formula> formulas_;
  FormulaMap<std::size_t> index_;
  std::vector<std::vector<ExplanationEntry>> entries_;

  std::size_t add_formula(const Formula& f) {
    auto it = index_.find(f);
    if (it != index_.end()) return it->second;
    std::size_t i = formulas_.size();
    index_.emplace(f, i);
    formulas_.push_back(f);
    entries_.emplace_back();
    return i;
  }
  // Adds unless an identical (term, extent) pair is already present.
  void add_entry(std::size_t i, const ExplanationTerm& t, WorldSet x) {
    for (const auto& e : entries_[i])
      if (e.extent == x && e.term == t) return;
    entries_[i].push_back(ExplanationEntry{t, formulas_[i], x});
  }
  bool has_extent(std::size_t i, WorldSet x) const {
    for (const auto& e : entries_[i])
      if (e.extent == x) return true;
    return false;
  }
};

// Least table for m over Λ ∪ declared ∪ extra, closed under implication
// decomposition for tracking and under MP for extents. New MP entries are
// keyed by extent (per formula), so the fixpoint lives in a finite lattice and
// terminates; the first witness term (s.t) of each new extent is recorded.
inline ExtentTable saturate(const KyModel& m, const std::vector<Formula>& extra = {}) {
  ExtentTable tbl;
  FormulaSet seen;
  auto track = [&](const Formula& f) {
    if (seen.insert(f).second) tbl.add_formula(f);
  };
  for (const auto& f : m.tautology_ground()) track(f);
  for (const auto& e : m.explanations()) track(e.formula);
  for (const auto& f : extra) track(f);
  close_under_implication(tbl.formulas_, seen);
  // close_under_implication appended to formulas_ without index upkeep:
  for (std::size_t i = 0; i < tbl.formulas_.size(); ++i) {
    tbl.index_.emplace(tbl.formulas_[i], i);
    if (tbl.entries_.size() <= i) tbl.entries_.emplace_back();
  }

  for (const auto& f : m.tautology_ground())
    tbl.add_entry(tbl.index_.at(f), ExplanationTerm::self_evident(), m.full());
  for (const auto& e : m.explanations()) tbl.add_entry(tbl.index_.at(e.formula), e.term, e.extent);

  // (implication index, antecedent index, consequent index) triples
  struct Link {
    std::size_t imp, ant, con;
  };
  std::vector<Link> links;
  for (std::size_t i = 0; i < tbl.formulas_.size(); ++i) {
    auto imp = tbl.formulas_[i].as_implication();
    if (!imp) continue;
    auto a = tbl.index_.find(imp->first);
    auto c = tbl.index_.find(imp->second);
    if (a != tbl.index_.end() && c != tbl.index_.end()) links.push_back({i, a->second, c->second});
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& link : links) {
      // snapshot sizes: entries added this round are picked up next round
      std::size_t ni = tbl.entries_[link.imp].size(), na = tbl.entries_[link.ant].size();
      for (std::size_t x = 0; x < ni; ++x)
        for (std::size_t y = 0; y < na; ++y) {
          // copies: the push_back below may reallocate these vectors when a
          // link's consequent coincides with its implication or antecedent
          ExplanationEntry ei = tbl.entries_[link.imp][x];
          ExplanationEntry ea = tbl.entries_[link.ant][y];
          WorldSet z = ei.extent & ea.extent;
          if (!tbl.has_extent(link.con, z)) {
            tbl.entries_[link.con].push_back(ExplanationEntry{
                ExplanationTerm::combine(ei.term, ea.term), tbl.formulas_[link.con], z});
            changed = true;
          }
        }
    }
  }
  return tbl;
}

// ---------------------------------------------------------------------------
// Structural validation (the semantics-dependent Λ check lives in
// semantics.hpp's validate_model, which calls this first).

enum class ViolationKind {
  BadId,
  Duplicate,
  OutOfRange,
  NotReflexive,
  NotSymmetric,
  NotTransitive,
  LambdaNotGlobal,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

inline std::vector<Violation> structural_violations(const KyModel& m) {
  std::vector<Violation> out;
  auto bad = [&](ViolationKind k, const std::string& msg) { out.push_back({k, msg}); };

  auto check_ids = [&](const std::vector<std::string>& ids, const char* what) {
    for (const auto& id : ids)
      if (!is_valid_id(id)) bad(ViolationKind::BadId, std::string(what) + " id '" + id + "' is not a token over [a-z0-9_]");
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (ids[i] == ids[j]) bad(ViolationKind::Duplicate, std::string("duplicate ") + what + " id '" + ids[i] + "'");
  };
  check_ids(m.worlds(), "world");
  check_ids(m.agents(), "agent");
  check_ids(m.atoms(), "atom");

  const auto& es = m.explanations();
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j)
      if (es[i] == es[j])
        bad(ViolationKind::Duplicate, "duplicate explanation entry (" + print_term(es[i].term) +
                                          ", " + print_formula(es[i].formula) + ")");

  WorldSet full = m.full();
  for (const auto& atom : m.atoms())
    if (!m.valuation(atom).subset_of(full))
      bad(ViolationKind::OutOfRange, "valuation of '" + atom + "' mentions unknown worlds");
  for (const auto& e : es)
    if (!e.extent.subset_of(full))
      bad(ViolationKind::OutOfRange,
          "extent of (" + print_term(e.term) + ", " + print_formula(e.formula) + ") mentions unknown worlds");

  if (m.s5_required()) {
    for (std::size_t a = 0; a < m.agents().size(); ++a) {
      const auto& name = m.agents()[a];
      for (int w = 0; w < m.world_count(); ++w) {
        WorldSet sw = m.successors(static_cast<int>(a), w);
        if (!sw.subset_of(full)) {
          bad(ViolationKind::OutOfRange, "relation of '" + name + "' mentions unknown worlds");
          continue;
        }
        if (!sw.contains(w))
          bad(ViolationKind::NotReflexive,
              "relation of '" + name + "' is not reflexive at " + m.worlds()[w]);
        bool sym_done = false, trans_done = false;
        sw.for_each([&](int v) {
          if (!sym_done && !m.successors(static_cast<int>(a), v).contains(w)) {
            bad(ViolationKind::NotSymmetric, "relation of '" + name + "' is not symmetric: (" +
                                                 m.worlds()[w] + "," + m.worlds()[v] +
                                                 ") without (" + m.worlds()[v] + "," + m.worlds()[w] + ")");
            sym_done = true;  // one witness per source world keeps reports short
          }
          if (!trans_done && !m.successors(static_cast<int>(a), v).subset_of(sw)) {
            bad(ViolationKind::NotTransitive,
                "relation of '" + name + "' is not transitive via (" + m.worlds()[w] + "," +
                    m.worlds()[v] + ")");
            trans_done = true;
          }
        });
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization. Lossless round trip: formulas are stored as normal-form
// strings, world sets as id arrays in world order.

using Json = nlohmann::ordered_json;

inline Json model_to_json(const KyModel& m) {
  Json j;
  j["worlds"] = m.worlds();
  j["agents"] = m.agents();
  j["atoms"] = m.atoms();
  Json rel = Json::object();
  for (std::size_t a = 0; a < m.agents().size(); ++a) {
    Json pairs = Json::array();
    for (int w = 0; w < m.world_count(); ++w)
      m.successors(static_cast<int>(a), w).for_each([&](int v) {
        pairs.push_back(Json::array({m.worlds()[w], m.worlds()[v]}));
      });
    rel[m.agents()[a]] = std::move(pairs);
  }
  j["relations"] = std::move(rel);
  Json val = Json::object();
  for (const auto& atom : m.atoms()) val[atom] = m.world_ids(m.valuation(atom));
  j["valuation"] = std::move(val);
  Json ex = Json::array();
  for (const auto& e : m.explanations())
    ex.push_back(Json{{"term", print_term(e.term)},
                      {"formula", print_formula(e.formula)},
                      {"extent", m.world_ids(e.extent)}});
  j["explanations"] = std::move(ex);
  Json lam = Json::array();
  for (const auto& f : m.tautology_ground()) lam.push_back(print_formula(f));
  j["tautology_ground"] = std::move(lam);
  j["s5"] = m.s5_required();
  return j;
}

inline KyModel model_from_json(const Json& j) {
  auto str_list = [&](const Json& v, const char* what) {
    if (!v.is_array()) throw Error(std::string("model json: ") + what + " must be an array");
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(x.get<std::string>());
    return out;
  };
  if (!j.is_object()) throw Error("model json: expected an object");
  for (const char* key : {"worlds", "agents", "atoms"})
    if (!j.contains(key)) throw Error(std::string("model json: missing key '") + key + "'");
  KyModel m(str_list(j.at("worlds"), "worlds"), str_list(j.at("agents"), "agents"),
            str_list(j.at("atoms"), "atoms"));
  if (j.contains("relations"))
    for (const auto& [agent, pairs] : j.at("relations").items()) {
      if (m.agent_index(agent) < 0) throw Error("model json: relation for unknown agent '" + agent + "'");
      for (const auto& p : pairs) {
        if (!p.is_array() || p.size() != 2) throw Error("model json: relation pairs must be [from, to]");
        m.add_edge(agent, p[0].get<std::string>(), p[1].get<std::string>());
      }
    }
  if (j.contains("valuation"))
    for (const auto& [atom, ids] : j.at("valuation").items()) {
      if (m.atom_index(atom) < 0) throw Error("model json: valuation for unknown atom '" + atom + "'");
      m.set_valuation(atom, str_list(ids, "valuation set"));
    }
  if (j.contains("explanations"))
    for (const auto& e : j.at("explanations")) {
      for (const char* key : {"term", "formula", "extent"})
        if (!e.contains(key)) throw Error(std::string("model json: explanation entry missing '") + key + "'");
      m.add_explanation(parse_term(e.at("term").get<std::string>()),
                        parse_formula(e.at("formula").get<std::string>()),
                        m.world_set(str_list(e.at("extent"), "extent")));
    }
  if (j.contains("tautology_ground"))
    for (const auto& s : j.at("tautology_ground")) m.add_tautology(parse_formula(s.get<std::string>()));
  if (j.contains("s5")) m.set_s5_required(j.at("s5").get<bool>());
  return m;
}

}  // namespace kywhy
