#pragma once

// Built-in fixture corpus: four small explanation-equipped models, five line
// derivations, and a named suite of checks over them. The corpus is fully
// self-contained (constructed in code, no external data) and is exposed both
// to the test suite and to the `corpus` CLI command.

#include <functional>
#include <string>
#include <vector>

#include "proofs.hpp"
#include "search.hpp"

namespace kywhy {

// ---------------------------------------------------------------------------
// Models.

// Two worlds, total relation; p everywhere, q only at w1; one explanation for
// p per world. Announcing q leaves {w1}, where t:p's extent covers.
inline KyModel model_m1() {
  KyModel m({"w1", "w2"}, {"a"}, {"p", "q"});
  m.set_total("a");
  m.set_valuation("p", {"w1", "w2"});
  m.set_valuation("q", {"w1"});
  m.add_explanation(ExplanationTerm::base("s"), Formula::atom("p"), m.world_set({"w1"}));
  m.add_explanation(ExplanationTerm::base("t"), Formula::atom("p"), m.world_set({"w2"}));
  return m;
}

// Extends model_m1 with a third world: p everywhere, q at w1 and w3, a third
// explanation r:p at w3. Announcing q leaves {w1,w3} with no uniform extent.
inline KyModel model_m2() {
  KyModel m({"w1", "w2", "w3"}, {"a"}, {"p", "q"});
  m.set_total("a");
  m.set_valuation("p", {"w1", "w2", "w3"});
  m.set_valuation("q", {"w1", "w3"});
  m.add_explanation(ExplanationTerm::base("s"), Formula::atom("p"), m.world_set({"w1"}));
  m.add_explanation(ExplanationTerm::base("t"), Formula::atom("p"), m.world_set({"w2"}));
  m.add_explanation(ExplanationTerm::base("r"), Formula::atom("p"), m.world_set({"w3"}));
  return m;
}

// Three worlds, total relation, p at {w2,w3}, q everywhere, one explanation
// for p per world. At w1 the announcement [p]Ky{a}q holds vacuously (w1 lacks
// p) while Kyr{a}(p,q) fails: no single extent covers both p-successors.
inline KyModel model_noncorrespondence() {
  KyModel m({"w1", "w2", "w3"}, {"a"}, {"p", "q"});
  m.set_total("a");
  m.set_valuation("p", {"w2", "w3"});
  m.set_valuation("q", {"w1", "w2", "w3"});
  m.add_explanation(ExplanationTerm::base("s"), Formula::atom("p"), m.world_set({"w1"}));
  m.add_explanation(ExplanationTerm::base("t"), Formula::atom("p"), m.world_set({"w2"}));
  m.add_explanation(ExplanationTerm::base("r"), Formula::atom("p"), m.world_set({"w3"}));
  return m;
}

// Three worlds, total relation, p and q at {1,3}, and one explanation for
// K{a}q whose extent is the whole domain. K{a}q is false everywhere (world 2
// refutes q), so the factive companion empties that extent and [p]Ky{a}K{a}q
// flips from true to false at world 1.
inline KyModel model_factivity() {
  KyModel m({"1", "2", "3"}, {"a"}, {"p", "q"});
  m.set_total("a");
  m.set_valuation("p", {"1", "3"});
  m.set_valuation("q", {"1", "3"});
  m.add_explanation(ExplanationTerm::base("t"), Formula::k("a", Formula::atom("q")),
                    m.world_set({"1", "2", "3"}));
  return m;
}

// ---------------------------------------------------------------------------
// Derivations (all instantiated with atomic p, q, r).

namespace detail {
inline DerivationLine line(Formula f, std::string rule, std::vector<int> refs = {}) {
  return DerivationLine{std::move(f), std::move(rule), std::move(refs), std::nullopt, std::nullopt};
}
}  // namespace detail

// ~Kyr{a}(p,q) -> K{a}~Kyr{a}(p,q) in SKYR: negative introspection of the
// conditional operator, assembled from T, 5, 4YKR, K, NK and tautologies.
inline Derivation derivation_negative_introspection() {
  using detail::line;
  Formula A = parse_formula("Kyr{a}(p, q)");
  Formula KA = Formula::k("a", A);
  Formula nA = Formula::not_(A), nKA = Formula::not_(KA);
  Formula KnKA = Formula::k("a", nKA), KnA = Formula::k("a", nA);
  auto imp = [](const Formula& x, const Formula& y) { return Formula::implies(x, y); };
  Derivation d;
  d.push_back(line(imp(KA, A), "T"));                                          // 1
  d.push_back(line(imp(imp(KA, A), imp(nA, nKA)), "PT"));                      // 2
  d.push_back(line(imp(nA, nKA), "MP", {1, 2}));                               // 3
  d.push_back(line(imp(nKA, KnKA), "5"));                                      // 4
  d.push_back(line(imp(imp(nA, nKA), imp(imp(nKA, KnKA), imp(nA, KnKA))), "PT"));  // 5
  d.push_back(line(imp(imp(nKA, KnKA), imp(nA, KnKA)), "MP", {3, 5}));         // 6
  d.push_back(line(imp(nA, KnKA), "MP", {4, 6}));                              // 7
  d.push_back(line(imp(A, KA), "4YKR"));                                       // 8
  d.push_back(line(imp(imp(A, KA), imp(nKA, nA)), "PT"));                      // 9
  d.push_back(line(imp(nKA, nA), "MP", {8, 9}));                               // 10
  DerivationLine nk = line(Formula::k("a", imp(nKA, nA)), "NK", {10});         // 11
  nk.agent = "a";
  d.push_back(std::move(nk));
  d.push_back(line(imp(Formula::k("a", imp(nKA, nA)), imp(KnKA, KnA)), "K"));  // 12
  d.push_back(line(imp(KnKA, KnA), "MP", {11, 12}));                           // 13
  d.push_back(line(imp(imp(nA, KnKA), imp(imp(KnKA, KnA), imp(nA, KnA))), "PT"));  // 14
  d.push_back(line(imp(imp(KnKA, KnA), imp(nA, KnA)), "MP", {7, 14}));         // 15
  d.push_back(line(imp(nA, KnA), "MP", {13, 15}));                             // 16
  return d;
}

// Kyr{a}(bot, p) in SKYR: an impossible condition yields conditional knowing
// why outright, via NK and UKyR.
inline Derivation derivation_impossible_condition() {
  using detail::line;
  Derivation d;
  d.push_back(line(parse_formula("~bot"), "PT"));  // 1
  DerivationLine nk = line(parse_formula("K{a}~bot"), "NK", {1});  // 2
  nk.agent = "a";
  d.push_back(std::move(nk));
  d.push_back(line(parse_formula("K{a}~bot -> Kyr{a}(bot, p)"), "UKyR"));  // 3
  d.push_back(line(parse_formula("Kyr{a}(bot, p)"), "MP", {2, 3}));        // 4
  return d;
}

// Kyr{a}(p, q -> r) -> (Kyr{a}(p, q) -> Kyr{a}(p, r)) in SKYR: same-condition
// distribution recovered from EKyR (which conjoins the conditions) and IKyR
// (which strengthens p & p back to p).
inline Derivation derivation_right_distribution() {
  using detail::line;
  auto imp = [](const Formula& x, const Formula& y) { return Formula::implies(x, y); };
  Formula p = Formula::atom("p");
  Formula A = parse_formula("Kyr{a}(p, q -> r)");
  Formula B = parse_formula("Kyr{a}(p, q)");
  Formula C = parse_formula("Kyr{a}(p & p, r)");
  Formula D = parse_formula("Kyr{a}(p, r)");
  Formula G = Formula::k("a", imp(p, Formula::and_(p, p)));
  Formula AB = Formula::and_(A, B);
  Derivation d;
  d.push_back(line(imp(A, imp(B, C)), "EKyR"));                                // 1
  d.push_back(line(imp(imp(A, imp(B, C)), imp(AB, C)), "PT"));                 // 2
  d.push_back(line(imp(AB, C), "MP", {1, 2}));                                 // 3
  d.push_back(line(imp(p, Formula::and_(p, p)), "PT"));                        // 4
  DerivationLine nk = line(G, "NK", {4});                                      // 5
  nk.agent = "a";
  d.push_back(std::move(nk));
  d.push_back(line(imp(C, imp(G, D)), "IKyR"));                                // 6
  d.push_back(line(imp(imp(C, imp(G, D)), imp(G, imp(C, D))), "PT"));          // 7
  d.push_back(line(imp(G, imp(C, D)), "MP", {6, 7}));                          // 8
  d.push_back(line(imp(C, D), "MP", {5, 8}));                                  // 9
  d.push_back(line(imp(imp(AB, C), imp(imp(C, D), imp(AB, D))), "PT"));        // 10
  d.push_back(line(imp(imp(C, D), imp(AB, D)), "MP", {3, 10}));                // 11
  d.push_back(line(imp(AB, D), "MP", {9, 11}));                                // 12
  d.push_back(line(imp(imp(AB, D), imp(A, imp(B, D))), "PT"));                 // 13
  d.push_back(line(imp(A, imp(B, D)), "MP", {12, 13}));                        // 14
  return d;
}

// Ky{a}p -> p in SKY: knowing why is factive, via PS and T chained together.
inline Derivation derivation_factive_knowledge() {
  using detail::line;
  Derivation d;
  d.push_back(line(parse_formula("Ky{a}p -> K{a}p"), "PS"));  // 1
  d.push_back(line(parse_formula("K{a}p -> p"), "T"));        // 2
  d.push_back(line(parse_formula("(Ky{a}p -> K{a}p) -> ((K{a}p -> p) -> (Ky{a}p -> p))"),
                   "PT"));                                    // 3
  d.push_back(line(parse_formula("(K{a}p -> p) -> (Ky{a}p -> p)"), "MP", {1, 3}));  // 4
  d.push_back(line(parse_formula("Ky{a}p -> p"), "MP", {2, 4}));                    // 5
  return d;
}

// Kyr{agent}(psi, phi) in SKYR for any phi in the tautology ground: the
// conditional form of the ground rule, derived through NKYR, NK and IKyR.
// `lambda_index` is the 1-based position of phi in the ground.
inline Derivation derivation_conditional_ground(const std::string& agent, const Formula& psi,
                                                const Formula& phi, int lambda_index) {
  using detail::line;
  auto imp = [](const Formula& x, const Formula& y) { return Formula::implies(x, y); };
  Formula top = Formula::top();
  Derivation d;
  DerivationLine nkyr = line(Formula::kyr(agent, top, phi), "NKYR");  // 1
  nkyr.lambda_index = lambda_index;
  d.push_back(std::move(nkyr));
  d.push_back(line(imp(psi, top), "PT"));  // 2
  DerivationLine nk = line(Formula::k(agent, imp(psi, top)), "NK", {2});  // 3
  nk.agent = agent;
  d.push_back(std::move(nk));
  d.push_back(line(imp(Formula::kyr(agent, top, phi),
                       imp(Formula::k(agent, imp(psi, top)), Formula::kyr(agent, psi, phi))),
                   "IKyR"));                                              // 4
  d.push_back(line(imp(Formula::k(agent, imp(psi, top)), Formula::kyr(agent, psi, phi)), "MP",
                   {1, 4}));                                              // 5
  d.push_back(line(Formula::kyr(agent, psi, phi), "MP", {3, 5}));         // 6
  return d;
}

// A one-formula tautology ground used by the ground-rule fixtures.
inline std::vector<Formula> demo_lambda() { return {parse_formula("p | ~p")}; }

// ---------------------------------------------------------------------------
// Corpus: named, self-contained checks over the fixtures.

struct CorpusResult {
  std::string name;
  bool pass;
  std::string detail;
};

inline std::vector<CorpusResult> run_corpus() {
  std::vector<CorpusResult> out;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    out.push_back(CorpusResult{name, pass, detail});
  };
  auto verdict = [](const KyModel& m, const std::string& w, const std::string& f) {
    return eval(m, w, parse_formula(f)).verdict;
  };

  {
    bool v = verdict(model_m1(), "w1", "[q]Ky{a}p");
    add("m1_announced_knowing_why", v, std::string("[q]Ky{a}p at w1: ") + (v ? "true" : "false"));
  }
  {
    bool v = verdict(model_m2(), "w1", "[q]Ky{a}p");
    add("m2_announced_knowing_why", !v, std::string("[q]Ky{a}p at w1: ") + (v ? "true" : "false"));
  }
  {
    KyModel u = update_model(model_m1(), Formula::atom("q"));
    bool pass = u.worlds() == std::vector<std::string>{"w1"} && validate_model(u).empty();
    add("m1_update_domain", pass, "domain after announcing q: " + std::to_string(u.worlds().size()) + " world(s)");
  }
  {
    KyModel u = update_model(model_m2(), Formula::atom("q"));
    bool pass = u.worlds() == std::vector<std::string>{"w1", "w3"} && validate_model(u).empty();
    add("m2_update_domain", pass, "domain after announcing q: " + std::to_string(u.worlds().size()) + " world(s)");
  }
  {
    bool v1 = verdict(model_noncorrespondence(), "w1", "[p]Ky{a}q");
    bool v2 = verdict(model_noncorrespondence(), "w1", "Kyr{a}(p, q)");
    add("noncorr_announced_true", v1, std::string("[p]Ky{a}q at w1: ") + (v1 ? "true" : "false"));
    add("noncorr_conditional_false", !v2, std::string("Kyr{a}(p,q) at w1: ") + (v2 ? "true" : "false"));
    CorrespondenceReport r = check_correspondence(model_noncorrespondence(), "w1", "a",
                                                  Formula::atom("p"), Formula::atom("q"));
    add("noncorr_report_disagrees", !r.standard_pair_agrees,
        std::string("standard pair agrees: ") + (r.standard_pair_agrees ? "yes" : "no"));
  }
  {
    KyModel m = model_factivity();
    KyModel c = factive_companion(m);
    bool v1 = verdict(m, "1", "[p]Ky{a}K{a}q");
    bool v2 = verdict(c, "1", "[p]Ky{a}K{a}q");
    bool empty = true;
    Formula kq = Formula::k("a", Formula::atom("q"));
    for (const auto& e : c.explanations())
      if (e.formula == kq && !e.extent.empty()) empty = false;
    add("factivity_base_true", v1, std::string("[p]Ky{a}K{a}q at 1: ") + (v1 ? "true" : "false"));
    add("factivity_companion_false", !v2,
        std::string("[p]Ky{a}K{a}q at 1 in companion: ") + (v2 ? "true" : "false"));
    add("factivity_companion_extent_empty", empty,
        std::string("companion extents for K{a}q empty: ") + (empty ? "yes" : "no"));
  }
  {
    auto c1 = check_derivation(derivation_negative_introspection(), ProofSystem::SKYR);
    add("negative_introspection_derivation", c1.ok,
        c1.ok ? "16 lines check" : "line " + std::to_string(c1.line) + ": " + c1.reason);
    auto c2 = check_derivation(derivation_impossible_condition(), ProofSystem::SKYR);
    add("impossible_condition_derivation", c2.ok,
        c2.ok ? "4 lines check" : "line " + std::to_string(c2.line) + ": " + c2.reason);
    auto c3 = check_derivation(derivation_right_distribution(), ProofSystem::SKYR);
    add("right_distribution_derivation", c3.ok,
        c3.ok ? "14 lines check" : "line " + std::to_string(c3.line) + ": " + c3.reason);
    auto c4 = check_derivation(derivation_factive_knowledge(), ProofSystem::SKY);
    add("factive_knowledge_derivation", c4.ok,
        c4.ok ? "5 lines check" : "line " + std::to_string(c4.line) + ": " + c4.reason);
    auto lam = demo_lambda();
    auto c5 = check_derivation(
        derivation_conditional_ground("a", Formula::atom("q"), lam[0], 1), ProofSystem::SKYR, lam);
    add("conditional_ground_derivation", c5.ok,
        c5.ok ? "6 lines check" : "line " + std::to_string(c5.line) + ": " + c5.reason);
  }
  {
    auto r = check_equivalence(parse_formula("Ky{a}p"), parse_formula("Kyr{a}(top, p)"));
    add("ky_conditional_embedding", r.equivalent,
        r.equivalent ? "indistinguishable within bounds" : "separated at " + r.witness->world);
  }
  {
    auto r = check_equivalence(parse_formula("[p]Ky{a}q"), parse_formula("p -> Kyr{a}(p, q)"),
                               Semantics::alt_kyr());
    add("alt_translation", r.equivalent,
        r.equivalent ? "indistinguishable within bounds" : "separated at " + r.witness->world);
  }
  return out;
}

// Fixture dumps for the CLI: models and derivations by name.
inline std::vector<std::string> corpus_fixture_names() {
  return {"m1",
          "m2",
          "noncorrespondence",
          "factivity",
          "factivity_companion",
          "negative_introspection",
          "impossible_condition",
          "right_distribution",
          "factive_knowledge",
          "conditional_ground",
          "demo_lambda"};
}

inline Json corpus_dump(const std::string& name) {
  if (name == "m1") return model_to_json(model_m1());
  if (name == "m2") return model_to_json(model_m2());
  if (name == "noncorrespondence") return model_to_json(model_noncorrespondence());
  if (name == "factivity") return model_to_json(model_factivity());
  if (name == "factivity_companion") return model_to_json(factive_companion(model_factivity()));
  if (name == "negative_introspection")
    return derivation_to_json(derivation_negative_introspection());
  if (name == "impossible_condition") return derivation_to_json(derivation_impossible_condition());
  if (name == "right_distribution") return derivation_to_json(derivation_right_distribution());
  if (name == "factive_knowledge") return derivation_to_json(derivation_factive_knowledge());
  if (name == "conditional_ground") {
    auto lam = demo_lambda();
    return derivation_to_json(derivation_conditional_ground("a", Formula::atom("q"), lam[0], 1));
  }
  if (name == "demo_lambda") {
    Json j = Json::array();
    for (const auto& f : demo_lambda()) j.push_back(print_formula(f));
    return j;
  }
  throw Error("unknown fixture '" + name + "'");
}

}  // namespace kywhy
