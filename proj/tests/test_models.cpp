#include <doctest.h>

#include <kywhy/fixtures.hpp>
#include <kywhy/model.hpp>
#include <kywhy/search.hpp>

#include "generators.hpp"

using namespace kywhy;

TEST_CASE("world sets") {
  WorldSet s;
  CHECK(s.empty());
  s = s.with(0).with(3);
  CHECK(s.contains(0));
  CHECK(s.contains(3));
  CHECK(!s.contains(1));
  CHECK(s.count() == 2);
  CHECK((s & WorldSet::full(2)).count() == 1);
  CHECK(s.subset_of(WorldSet::full(4)));
  CHECK(!WorldSet::full(4).subset_of(s));
}

TEST_CASE("model construction guards") {
  CHECK_THROWS_AS(KyModel({}, {"a"}, {}), Error);
  CHECK_THROWS_AS(KyModel({"w1"}, {}, {}), Error);
  KyModel m({"w1"}, {"a"}, {"p"});
  CHECK_THROWS_AS(m.add_edge("a", "w1", "nope"), Error);
  CHECK_THROWS_AS(m.set_valuation("zap", {"w1"}), Error);
  CHECK(m.world_index("w1") == 0);
  CHECK(m.world_index("w9") == -1);
}

TEST_CASE("structural validation") {
  KyModel m({"w1", "w2"}, {"a"}, {"p"});
  m.set_valuation("p", {"w1"});
  // missing reflexive edges under the s5 flag
  m.add_edge("a", "w1", "w2");
  auto v = validate_model(m);
  CHECK(!v.empty());
  m.set_total("a");
  CHECK(validate_model(m).empty());

  SUBCASE("asymmetric relation is flagged with a witness") {
    KyModel bad({"w1", "w2"}, {"a"}, {"p"});
    bad.add_edge("a", "w1", "w1");
    bad.add_edge("a", "w2", "w2");
    bad.add_edge("a", "w1", "w2");
    auto violations = validate_model(bad);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& viol : violations)
      if (viol.message.find("symmetr") != std::string::npos) found = true;
    CHECK(found);
  }

  SUBCASE("non-s5 relations pass when the flag is off") {
    KyModel loose({"w1", "w2"}, {"a"}, {"p"});
    loose.add_edge("a", "w1", "w2");
    loose.set_s5_required(false);
    CHECK(validate_model(loose).empty());
  }

  SUBCASE("bad identifiers are rejected") {
    KyModel weird({"W1"}, {"a"}, {"p"});
    weird.set_total("a");
    CHECK(!validate_model(weird).empty());
  }

  SUBCASE("non-global ground formula is flagged") {
    KyModel g({"w1", "w2"}, {"a"}, {"p"});
    g.set_total("a");
    g.set_valuation("p", {"w1"});
    g.add_tautology(parse_formula("p | ~p"));
    CHECK(validate_model(g).empty());
    g.add_tautology(parse_formula("p"));
    auto violations = validate_model(g);
    REQUIRE(!violations.empty());
    CHECK(violations.back().message.find("w2") != std::string::npos);
  }
}

TEST_CASE("extent closure matches the naive oracle") {
  // hand-checkable seed: declared (s, p -> q, {w1,w2}) and (t, p, {w2,w3})
  KyModel m({"w1", "w2", "w3"}, {"a"}, {"p", "q"});
  m.set_total("a");
  Formula p = Formula::atom("p"), q = Formula::atom("q");
  Formula imp = Formula::implies(p, q);
  m.add_explanation(ExplanationTerm::base("s"), imp, WorldSet(0b011));
  m.add_explanation(ExplanationTerm::base("t"), p, WorldSet(0b110));
  ExtentTable tbl = saturate(m, {q});
  REQUIRE(tbl.tracked(q));
  auto extents = tbl.extents_of(q);
  REQUIRE(extents.size() == 1);
  CHECK(extents[0] == WorldSet(0b010));
  // the witness combines both source terms
  bool witnessed = false;
  for (const auto& e : tbl.entries_at(q))
    if (print_term(e.term) == "(s.t)") witnessed = true;
  CHECK(witnessed);

  SUBCASE("random instances agree with the oracle") {
    testgen::FormulaGen gen(99, {"p", "q"}, {"a"});
    std::mt19937_64 rng(4242);
    for (int round = 0; round < 25; ++round) {
      KyModel rm({"w1", "w2", "w3"}, {"a"}, {"p", "q"});
      rm.set_total("a");
      std::vector<Formula> pool = {p, q, imp, Formula::implies(q, p),
                                   Formula::implies(imp, q), Formula::and_(p, q)};
      std::vector<std::pair<Formula, std::uint64_t>> initial;
      for (int e = 0; e < 4; ++e) {
        Formula f = pool[rng() % pool.size()];
        std::uint64_t mask = rng() & 7;
        rm.add_explanation(ExplanationTerm::base("x" + std::to_string(e)), f, WorldSet(mask));
        initial.emplace_back(f, mask);
      }
      ExtentTable tbl2 = saturate(rm, pool);
      std::vector<Formula> tracked = tbl2.tracked_formulas();
      for (const auto& [name, masks] : testgen::naive_extent_closure(tracked, initial)) {
        Formula f = parse_formula(name);
        std::set<std::uint64_t> got;
        for (const auto& x : tbl2.extents_of(f)) got.insert(x.bits());
        CHECK(got == masks);
      }
    }
  }
}

TEST_CASE("closure is monotone in the declared entries") {
  KyModel base({"w1", "w2"}, {"a"}, {"p", "q"});
  base.set_total("a");
  Formula p = Formula::atom("p"), q = Formula::atom("q");
  base.add_explanation(ExplanationTerm::base("s"), Formula::implies(p, q), WorldSet(0b11));
  KyModel more = base;
  more.add_explanation(ExplanationTerm::base("t"), p, WorldSet(0b01));
  ExtentTable small = saturate(base, {p, q});
  ExtentTable big = saturate(more, {p, q});
  for (const auto& f : small.tracked_formulas()) {
    auto had = small.extents_of(f);
    auto now = big.extents_of(f);
    for (const auto& x : had) {
      bool still = false;
      for (const auto& y : now) still = still || x == y;
      CHECK(still);
    }
  }
  CHECK(big.extents_of(q).size() > small.extents_of(q).size());
}

TEST_CASE("ground formulas are self evident everywhere") {
  KyModel m({"w1", "w2"}, {"a"}, {"p"});
  m.set_total("a");
  Formula taut = parse_formula("p | ~p");
  m.add_tautology(taut);
  ExtentTable tbl = saturate(m);
  auto extents = tbl.extents_of(taut);
  REQUIRE(extents.size() == 1);
  CHECK(extents[0] == m.full());
  CHECK(print_term(tbl.entries_at(taut)[0].term) == "e");
  CHECK_THROWS_AS(tbl.extents_of(parse_formula("q")), Error);
}

TEST_CASE("restriction compresses and preserves order") {
  KyModel m = model_m2();
  KyModel r = restrict_to(m, m.world_set({"w1", "w3"}));
  CHECK(r.worlds() == std::vector<std::string>{"w1", "w3"});
  CHECK(r.valuation("q") == r.full());
  CHECK(r.successors(0, 0) == r.full());
  // extents are intersected and reindexed
  int with_extent = 0;
  for (const auto& e : r.explanations())
    if (!e.extent.empty()) ++with_extent;
  CHECK(with_extent == 2);  // s:{w1} and r:{w3} survive, t:{w2} empties
  CHECK_THROWS_AS(restrict_to(m, WorldSet()), Error);
}

TEST_CASE("model json round trip") {
  for (KyModel m : {model_m1(), model_m2(), model_noncorrespondence(), model_factivity()}) {
    KyModel back = model_from_json(model_to_json(m));
    CHECK(back == m);
  }
  KyModel g({"w1"}, {"a"}, {"p"});
  g.set_total("a");
  g.add_tautology(parse_formula("p | ~p"));
  g.set_s5_required(false);
  CHECK(model_from_json(model_to_json(g)) == g);

  SUBCASE("sampled models round trip") {
    SearchBounds b;
    b.atoms = {"p", "q"};
    for (const auto& m : sample_models(b, 11, 25, {Formula::atom("p")}))
      CHECK(model_from_json(model_to_json(m)) == m);
  }

  SUBCASE("malformed documents are rejected") {
    CHECK_THROWS_AS(model_from_json(Json::parse("{}")), Error);
    Json j = model_to_json(model_m1());
    j["relations"]["a"].push_back(Json::array({"w1", "w9"}));
    CHECK_THROWS_AS(model_from_json(j), Error);
  }
}

TEST_CASE("announcement update") {
  KyModel m = model_m1();
  KyModel u = update_model(m, Formula::atom("q"));
  CHECK(u.worlds() == std::vector<std::string>{"w1"});
  CHECK_THROWS_WITH_AS(update_model(m, parse_formula("p & ~p")),
                       doctest::Contains("empty"), Error);
  // announcing something true everywhere only rebuilds the same model
  CHECK(update_model(m, Formula::atom("p")) == restrict_to(m, m.full()));
}

TEST_CASE("factivity detection") {
  CHECK(is_factive(model_m1()));
  CHECK(is_factive(model_m2()));
  CHECK(!is_factive(model_factivity()));
  KyModel m = model_m1();
  m.add_explanation(ExplanationTerm::base("u"), Formula::atom("q"), m.full());
  CHECK(!is_factive(m));  // q fails at w2
}

TEST_CASE("factive companion preserves derived evidence") {
  // Restricting only the declared extents is not enough: here the material
  // conditional evidence and its antecedent jointly ground q everywhere, and
  // that derived ground is itself factive even though the antecedent entry is
  // not. The companion has to keep it.
  KyModel m({"w1", "w2"}, {"a"}, {"p", "q"});
  m.set_total("a");
  m.set_valuation("p", {"w1"});
  m.set_valuation("q", {"w1", "w2"});
  Formula p = Formula::atom("p"), q = Formula::atom("q");
  m.add_explanation(ExplanationTerm::base("s"), Formula::implies(p, q), m.full());
  m.add_explanation(ExplanationTerm::base("t"), p, m.full());

  Formula kyq = Formula::ky("a", q);
  REQUIRE(eval(m, "w1", kyq).verdict);

  // the naive transform loses the verdict
  KyModel naive = m;
  naive.clear_explanations();
  for (const auto& e : m.explanations())
    naive.add_explanation(e.term, e.formula, e.extent & truth_set(m, e.formula));
  CHECK(!eval(naive, "w1", kyq).verdict);

  KyModel c = factive_companion(m);
  CHECK(is_factive(c));
  CHECK(validate_model(c).empty());
  CHECK(eval(c, "w1", kyq).verdict);
  for (const auto& f : {kyq, Formula::ky("a", p), Formula::k("a", q),
                        Formula::ky("a", Formula::implies(p, q))})
    for (const auto& w : m.worlds())
      CHECK(eval(m, w, f).verdict == eval(c, w, f).verdict);
}

TEST_CASE("factive companion is idempotent") {
  for (KyModel m : {model_m1(), model_m2(), model_factivity(), model_noncorrespondence()}) {
    KyModel c = factive_companion(m);
    CHECK(is_factive(c));
    CHECK(factive_companion(c) == c);
  }
  SUBCASE("a factive model is its own companion") {
    KyModel m = model_m1();
    CHECK(factive_companion(m) == m);
  }
}

TEST_CASE("query relevant formulas") {
  Formula f = parse_formula("[p]Ky{a}(q -> p) & Kyr{b}(r, q)");
  auto targets = extent_target_formulas(f);
  REQUIRE(targets.size() == 2);
  CHECK(targets[0] == parse_formula("q -> p"));
  CHECK(targets[1] == parse_formula("q"));
  // relevant formulas additionally track conditions
  auto relevant = query_relevant_formulas(f);
  bool has_r = false;
  for (const auto& g : relevant) has_r = has_r || g == Formula::atom("r");
  CHECK(has_r);
}
