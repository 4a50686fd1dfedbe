#pragma once

// Hilbert-style proof checking for the systems SKY and SKYR.
//
// SKY  : PT, K, Ky, T, 4, 5, PS, 4YK        rules MP, NK, NKY
// SKYR : PT, K, T, 4, 5, EKyR, 4YKR, DKyR,  rules MP, NK, NKYR
//        IKyR, UKyR
//
// A derivation is a list of lines; every line carries its own justification
// (axiom-schema name, PT for propositional tautologies, or a rule with
// 1-based references to earlier lines). check_derivation reports the first
// failing line. soundness_probe re-evaluates every line of a checked
// derivation over sample models.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semantics.hpp"

namespace kywhy {

enum class ProofSystem { SKY, SKYR };

inline const char* to_string(ProofSystem s) { return s == ProofSystem::SKY ? "SKY" : "SKYR"; }

inline ProofSystem proof_system_from_string(const std::string& s) {
  if (s == "sky" || s == "SKY") return ProofSystem::SKY;
  if (s == "skyr" || s == "SKYR") return ProofSystem::SKYR;
  throw Error("unknown proof system '" + s + "' (expected sky or skyr)");
}

// ---------------------------------------------------------------------------
// Axiom schemas. Patterns are ordinary formulas whose atoms mv_phi, mv_psi,
// mv_chi, mv_theta act as formula metavariables and whose agent mv_a is an
// agent metavariable.

struct AxiomSchema {
  std::string name;
  Formula pattern;
};

inline const std::vector<AxiomSchema>& axiom_schemas(ProofSystem sys) {
  static const std::vector<AxiomSchema> sky = [] {
    auto P = [](const char* s) { return parse_formula(s); };
    return std::vector<AxiomSchema>{
        {"K", P("K{mv_a}(mv_phi -> mv_psi) -> (K{mv_a}mv_phi -> K{mv_a}mv_psi)")},
        {"Ky", P("Ky{mv_a}(mv_phi -> mv_psi) -> (Ky{mv_a}mv_phi -> Ky{mv_a}mv_psi)")},
        {"T", P("K{mv_a}mv_phi -> mv_phi")},
        {"4", P("K{mv_a}mv_phi -> K{mv_a}K{mv_a}mv_phi")},
        {"5", P("~K{mv_a}mv_phi -> K{mv_a}~K{mv_a}mv_phi")},
        {"PS", P("Ky{mv_a}mv_phi -> K{mv_a}mv_phi")},
        {"4YK", P("Ky{mv_a}mv_phi -> K{mv_a}Ky{mv_a}mv_phi")},
    };
  }();
  static const std::vector<AxiomSchema> skyr = [] {
    auto P = [](const char* s) { return parse_formula(s); };
    return std::vector<AxiomSchema>{
        {"K", P("K{mv_a}(mv_phi -> mv_psi) -> (K{mv_a}mv_phi -> K{mv_a}mv_psi)")},
        {"T", P("K{mv_a}mv_phi -> mv_phi")},
        {"4", P("K{mv_a}mv_phi -> K{mv_a}K{mv_a}mv_phi")},
        {"5", P("~K{mv_a}mv_phi -> K{mv_a}~K{mv_a}mv_phi")},
        {"EKyR", P("Kyr{mv_a}(mv_chi, mv_phi -> mv_psi) -> "
                   "(Kyr{mv_a}(mv_theta, mv_phi) -> Kyr{mv_a}(mv_chi & mv_theta, mv_psi))")},
        {"4YKR", P("Kyr{mv_a}(mv_phi, mv_psi) -> K{mv_a}Kyr{mv_a}(mv_phi, mv_psi)")},
        {"DKyR", P("Kyr{mv_a}(mv_phi, mv_psi) -> K{mv_a}(mv_phi -> mv_psi)")},
        {"IKyR", P("Kyr{mv_a}(mv_psi, mv_chi) -> (K{mv_a}(mv_phi -> mv_psi) -> Kyr{mv_a}(mv_phi, mv_chi))")},
        {"UKyR", P("K{mv_a}~mv_phi -> Kyr{mv_a}(mv_phi, mv_psi)")},
    };
  }();
  return sys == ProofSystem::SKY ? sky : skyr;
}

struct Substitution {
  std::map<std::string, Formula> formulas;  // metavariable -> instance
  std::map<std::string, std::string> agents;
};

namespace detail {

inline bool is_metavar(const Formula& f) {
  return f.kind() == Kind::Atom && f.name().rfind("mv_", 0) == 0;
}

inline bool match_pattern(const Formula& pat, const Formula& f, Substitution& sub) {
  if (is_metavar(pat)) {
    auto [it, fresh] = sub.formulas.emplace(pat.name(), f);
    return fresh || it->second == f;
  }
  if (pat.kind() != f.kind()) return false;
  switch (pat.kind()) {
    case Kind::Atom:
      return pat.name() == f.name();
    case Kind::Not:
      return match_pattern(pat.operand(), f.operand(), sub);
    case Kind::And:
      return match_pattern(pat.lhs(), f.lhs(), sub) && match_pattern(pat.rhs(), f.rhs(), sub);
    case Kind::K:
    case Kind::Ky:
    case Kind::KyR:
    case Kind::Announce: {
      if (pat.kind() != Kind::Announce) {
        const std::string& pa = pat.agent();
        if (pa.rfind("mv_", 0) == 0) {
          auto [it, fresh] = sub.agents.emplace(pa, f.agent());
          if (!fresh && it->second != f.agent()) return false;
        } else if (pa != f.agent()) {
          return false;
        }
      }
      if (pat.kind() == Kind::KyR || pat.kind() == Kind::Announce) {
        Formula pa = pat.kind() == Kind::KyR ? pat.condition() : pat.announcement();
        Formula fa = f.kind() == Kind::KyR ? f.condition() : f.announcement();
        if (!match_pattern(pa, fa, sub)) return false;
      }
      return match_pattern(pat.body(), f.body(), sub);
    }
  }
  return false;
}

}  // namespace detail

// Unifies f against the named schema of the system; empty when f is not an
// instance. Unknown schema names are errors.
inline std::optional<Substitution> match_axiom(const Formula& f, const std::string& schema,
                                               ProofSystem sys) {
  for (const auto& ax : axiom_schemas(sys)) {
    if (ax.name != schema) continue;
    Substitution sub;
    if (detail::match_pattern(ax.pattern, f, sub)) return sub;
    return std::nullopt;
  }
  throw Error("unknown axiom schema '" + schema + "' in system " + to_string(sys));
}

// ---------------------------------------------------------------------------
// Propositional tautology check by boolean abstraction: maximal modal-rooted
// subformulas (K/Ky/Kyr/announcement nodes) become opaque variables, then the
// formula is tabled over all assignments.

inline bool check_tautology(const Formula& f) {
  FormulaMap<int> var_of;
  std::map<std::string, int> atom_var;
  int vars = 0;
  std::function<void(const Formula&)> scan = [&](const Formula& g) {
    switch (g.kind()) {
      case Kind::Atom:
        if (atom_var.emplace(g.name(), vars).second) ++vars;
        return;
      case Kind::Not:
        scan(g.operand());
        return;
      case Kind::And:
        scan(g.lhs());
        scan(g.rhs());
        return;
      default:
        if (var_of.emplace(g, vars).second) ++vars;
        return;
    }
  };
  scan(f);
  if (vars > 20) throw Error("tautology check over more than 20 boolean variables");

  std::function<bool(const Formula&, std::uint32_t)> value = [&](const Formula& g,
                                                                 std::uint32_t assign) -> bool {
    switch (g.kind()) {
      case Kind::Atom:
        return (assign >> atom_var.at(g.name())) & 1;
      case Kind::Not:
        return !value(g.operand(), assign);
      case Kind::And:
        return value(g.lhs(), assign) && value(g.rhs(), assign);
      default:
        return (assign >> var_of.at(g)) & 1;
    }
  };
  for (std::uint32_t a = 0; a < (1u << vars); ++a)
    if (!value(f, a)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Derivations.

struct DerivationLine {
  Formula formula;
  std::string rule;                 // schema name, "PT", "MP", "NK", "NKY", "NKYR"
  std::vector<int> refs;            // 1-based, strictly earlier lines
  std::optional<std::string> agent;       // NK (optional; checked when present)
  std::optional<int> lambda_index;        // NKY/NKYR diagnostic hint
};

using Derivation = std::vector<DerivationLine>;

struct CheckResult {
  bool ok;
  int line;            // 1-based first failing line; 0 when ok
  std::string reason;  // empty when ok
};

inline CheckResult check_derivation(const Derivation& d, ProofSystem sys,
                                    const std::vector<Formula>& lambda = {}) {
  auto fail = [](int line, const std::string& why) { return CheckResult{false, line, why}; };
  auto is_rule = [](const std::string& r) {
    return r == "PT" || r == "MP" || r == "NK" || r == "NKY" || r == "NKYR";
  };
  auto in_lambda = [&](const Formula& f) {
    for (const auto& lam : lambda)
      if (lam == f) return true;
    return false;
  };

  for (std::size_t i = 0; i < d.size(); ++i) {
    const DerivationLine& ln = d[i];
    int here = static_cast<int>(i) + 1;
    if (!ln.formula.valid()) return fail(here, "missing formula");
    for (int r : ln.refs)
      if (r < 1 || r >= here) return fail(here, "reference to line " + std::to_string(r) + " is not strictly earlier");
    if (ln.lambda_index && (*ln.lambda_index < 1 || *ln.lambda_index > static_cast<int>(lambda.size())))
      return fail(here, "lambda index out of range");

    if (ln.rule == "PT") {
      if (!check_tautology(ln.formula)) return fail(here, "not a propositional tautology");
    } else if (ln.rule == "MP") {
      if (ln.refs.size() != 2) return fail(here, "MP needs exactly two references");
      const Formula& minor = d[ln.refs[0] - 1].formula;
      auto imp = d[ln.refs[1] - 1].formula.as_implication();
      if (!imp) return fail(here, "MP: line " + std::to_string(ln.refs[1]) + " is not an implication");
      if (!(imp->first == minor))
        return fail(here, "MP: line " + std::to_string(ln.refs[0]) + " is not the antecedent of line " +
                              std::to_string(ln.refs[1]));
      if (!(imp->second == ln.formula)) return fail(here, "MP: conclusion mismatch");
    } else if (ln.rule == "NK") {
      if (ln.refs.size() != 1) return fail(here, "NK needs exactly one reference");
      if (ln.formula.kind() != Kind::K) return fail(here, "NK: conclusion is not a K formula");
      if (ln.agent && *ln.agent != ln.formula.agent())
        return fail(here, "NK: agent field disagrees with conclusion");
      if (!(ln.formula.body() == d[ln.refs[0] - 1].formula))
        return fail(here, "NK: conclusion body differs from referenced line");
    } else if (ln.rule == "NKY") {
      if (sys != ProofSystem::SKY) return fail(here, "rule NKY belongs to SKY only");
      if (ln.formula.kind() != Kind::Ky) return fail(here, "NKY: conclusion is not a Ky formula");
      if (!in_lambda(ln.formula.body()))
        return fail(here, "NKY: body is not in the tautology ground");
    } else if (ln.rule == "NKYR") {
      if (sys != ProofSystem::SKYR) return fail(here, "rule NKYR belongs to SKYR only");
      if (ln.formula.kind() != Kind::KyR) return fail(here, "NKYR: conclusion is not a Kyr formula");
      if (!ln.formula.condition().is_top()) return fail(here, "NKYR: condition must be top");
      if (!in_lambda(ln.formula.body()))
        return fail(here, "NKYR: body is not in the tautology ground");
    } else if (!is_rule(ln.rule)) {
      // axiom schema line
      bool known = false;
      for (const auto& ax : axiom_schemas(sys)) known = known || ax.name == ln.rule;
      if (!known) return fail(here, "unknown rule or schema '" + ln.rule + "' in system " + to_string(sys));
      if (!ln.refs.empty()) return fail(here, "axiom line must not cite references");
      if (!match_axiom(ln.formula, ln.rule, sys))
        return fail(here, "not an instance of schema " + ln.rule);
    }
  }
  if (d.empty()) return CheckResult{false, 0, "empty derivation"};
  return CheckResult{true, 0, ""};
}

// ---------------------------------------------------------------------------
// Soundness probe: every line of a checked derivation is evaluated at every
// world of every sample model. Samples must be valid, and when the derivation
// draws on a tautology ground, each Λ formula must be part of the sample's
// ground (otherwise NKY/NKYR lines have no semantic backing).

struct ProbeReport {
  int models_checked = 0;
  long long evaluations = 0;
  struct Falsified {
    int model;  // index into samples
    std::string world;
    int line;   // 1-based
  };
  std::optional<Falsified> falsified;
};

inline ProbeReport soundness_probe(const Derivation& d, ProofSystem sys,
                                   const std::vector<Formula>& lambda,
                                   const std::vector<KyModel>& samples) {
  CheckResult c = check_derivation(d, sys, lambda);
  if (!c.ok)
    throw Error("soundness_probe: derivation does not check (line " + std::to_string(c.line) +
                ": " + c.reason + ")");
  ProbeReport report;
  for (std::size_t mi = 0; mi < samples.size(); ++mi) {
    const KyModel& m = samples[mi];
    if (!validate_model(m).empty())
      throw Error("soundness_probe: sample model " + std::to_string(mi) + " is invalid");
    for (const auto& lam : lambda) {
      bool found = false;
      for (const auto& g : m.tautology_ground()) found = found || g == lam;
      if (!found)
        throw Error("soundness_probe: sample model " + std::to_string(mi) +
                    " lacks tautology-ground formula '" + print_formula(lam) + "'");
    }
    std::vector<Formula> universe;
    FormulaSet seen;
    for (const auto& ln : d) collect_query_relevant(ln.formula, universe, seen);
    detail::Evaluator ev(m, Semantics::standard(), std::move(universe));
    ++report.models_checked;
    for (std::size_t li = 0; li < d.size(); ++li)
      for (int w = 0; w < m.world_count(); ++w) {
        ++report.evaluations;
        if (!ev.truth(w, d[li].formula)) {
          if (!report.falsified)
            report.falsified = ProbeReport::Falsified{static_cast<int>(mi), m.worlds()[w],
                                                      static_cast<int>(li) + 1};
        }
      }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Derivation JSON: an array of {formula, rule, refs, agent?, lambda_index?}.

inline Json derivation_to_json(const Derivation& d) {
  Json j = Json::array();
  for (const auto& ln : d) {
    Json line{{"formula", print_formula(ln.formula)}, {"rule", ln.rule}, {"refs", ln.refs}};
    if (ln.agent) line["agent"] = *ln.agent;
    if (ln.lambda_index) line["lambda_index"] = *ln.lambda_index;
    j.push_back(std::move(line));
  }
  return j;
}

inline Derivation derivation_from_json(const Json& j) {
  if (!j.is_array()) throw Error("derivation json: expected an array of lines");
  Derivation d;
  for (const auto& line : j) {
    if (!line.contains("formula") || !line.contains("rule"))
      throw Error("derivation json: each line needs 'formula' and 'rule'");
    DerivationLine ln;
    ln.formula = parse_formula(line.at("formula").get<std::string>());
    ln.rule = line.at("rule").get<std::string>();
    if (line.contains("refs"))
      for (const auto& r : line.at("refs")) ln.refs.push_back(r.get<int>());
    if (line.contains("agent")) ln.agent = line.at("agent").get<std::string>();
    if (line.contains("lambda_index")) ln.lambda_index = line.at("lambda_index").get<int>();
    d.push_back(std::move(ln));
  }
  return d;
}

inline std::vector<Formula> lambda_from_json(const Json& j) {
  if (!j.is_array()) throw Error("lambda json: expected an array of formula strings");
  std::vector<Formula> out;
  for (const auto& s : j) out.push_back(parse_formula(s.get<std::string>()));
  return out;
}

}  // namespace kywhy
