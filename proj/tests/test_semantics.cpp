#include <doctest.h>

#include <kywhy/fixtures.hpp>
#include <kywhy/semantics.hpp>

#include "generators.hpp"

using namespace kywhy;

namespace {
Formula F(const std::string& s) { return parse_formula(s); }
}  // namespace

TEST_CASE("two worlds, explanations split per world") {
  KyModel m = model_m1();
  // p is known but not known-why: no single extent covers both successors
  CHECK(eval(m, "w1", F("K{a}p")).verdict);
  CHECK(!eval(m, "w1", F("Ky{a}p")).verdict);
  // announcing q shrinks the epistemic range to w1, where s covers
  CHECK(eval(m, "w1", F("[q]Ky{a}p")).verdict);
  CHECK(update_model(m, F("q")).worlds() == std::vector<std::string>{"w1"});

  SUBCASE("witness names the covering entry") {
    KyModel u = update_model(m, F("q"));
    EvalResult r = eval(u, "w1", F("Ky{a}p"));
    REQUIRE(r.verdict);
    REQUIRE(r.witness.has_value());
    CHECK(print_term(r.witness->term) == "s");
    CHECK(r.witness->extent == u.full());
  }
}

TEST_CASE("three worlds, update leaves no uniform extent") {
  KyModel m = model_m2();
  CHECK(eval(m, "w1", F("K{a}p")).verdict);
  CHECK(!eval(m, "w1", F("[q]Ky{a}p")).verdict);
  KyModel u = update_model(m, F("q"));
  CHECK(u.worlds() == std::vector<std::string>{"w1", "w3"});
  CHECK(eval(u, "w1", F("K{a}p")).verdict);
  CHECK(!eval(u, "w1", F("Ky{a}p")).verdict);
}

TEST_CASE("vacuous knowing why") {
  KyModel m({"w1"}, {"a"}, {"p"});
  m.set_s5_required(false);  // no edges at all
  EvalResult r = eval(m, "w1", F("Ky{a}p"));
  CHECK(r.verdict);
  REQUIRE(r.witness.has_value());
  CHECK(print_term(r.witness->term) == "e");
  CHECK(r.witness->extent.empty());

  SUBCASE("conditional variant is vacuous when no successor fits the condition") {
    KyModel m1 = model_m1();
    CHECK(eval(m1, "w1", F("Kyr{a}(~p, q)")).verdict);
    CHECK(holds_globally(m1, F("Kyr{a}(p & ~p, q)")));
  }
}

TEST_CASE("unguarded conditional collapses to plain knowing why") {
  SearchBounds b;
  b.atoms = {"p", "q"};
  for (Formula body : {F("p"), F("q -> p"), F("K{a}q")}) {
    Formula plain = Formula::ky("a", body);
    Formula cond = Formula::kyr("a", Formula::top(), body);
    for (const auto& m : sample_models(b, 7, 60, {body}))
      for (const auto& w : m.worlds()) {
        CAPTURE(print_formula(body));
        CHECK(eval(m, w, plain).verdict == eval(m, w, cond).verdict);
      }
  }
}

TEST_CASE("empty context matches the plain reading on announcement-free input") {
  testgen::FormulaGen gen(31, {"p", "q"}, {"a", "b"});
  SearchBounds b;
  b.atoms = {"p", "q"};
  b.agents = {"a", "b"};
  auto models = sample_models(b, 13, 12, {F("p"), F("q")});
  for (int i = 0; i < 40; ++i) {
    Formula f = gen.elkyr(3);
    Semantics ctx = Semantics::with_context();
    for (const auto& m : models)
      for (const auto& w : m.worlds()) {
        CAPTURE(print_formula(f));
        CHECK(eval(m, w, f).verdict == eval(m, w, f, ctx).verdict);
      }
  }
}

TEST_CASE("announcements restrict and short circuit") {
  KyModel m = model_noncorrespondence();
  // w1 lacks p, so any announcement of p holds there vacuously
  CHECK(eval(m, "w1", F("[p]Ky{a}q")).verdict);
  CHECK(eval(m, "w1", F("[p](q & ~q)")).verdict);
  CHECK(!eval(m, "w2", F("[p]Ky{a}q")).verdict);

  SUBCASE("announcement agrees with explicit update at surviving worlds") {
    for (Formula g : {F("p"), F("q"), F("p | q"), F("K{a}p")}) {
      for (Formula f : {F("Ky{a}p"), F("K{a}q"), F("Kyr{a}(p, q)")}) {
        Formula announced = Formula::announce(g, f);
        WorldSet keep = truth_set(m, g);
        for (const auto& w : m.worlds()) {
          bool direct = eval(m, w, announced).verdict;
          bool expected = true;
          if (keep.contains(m.world_index(w)))
            expected = eval(update_model(m, g), w, f).verdict;
          CHECK(direct == expected);
        }
      }
    }
  }
}

TEST_CASE("alternative conditional reads its body after the update") {
  KyModel m = model_factivity();
  Formula kyr = F("Kyr{a}(p, K{a}q)");
  // standard: the body is false at the p-successors of world 1
  CHECK(!eval(m, "1", kyr).verdict);
  // alternative: the body is evaluated in the p-updated model, where it holds,
  // and the declared extent covers the p-successors
  CHECK(eval(m, "1", kyr, Semantics::alt_kyr()).verdict);

  SUBCASE("only the conditional clause changes") {
    KyModel m1 = model_m1();
    CHECK(eval(m1, "w1", F("Ky{a}p"), Semantics::alt_kyr()).verdict ==
          eval(m1, "w1", F("Ky{a}p")).verdict);
    CHECK(eval(m1, "w1", F("[q]Ky{a}p"), Semantics::alt_kyr()).verdict ==
          eval(m1, "w1", F("[q]Ky{a}p")).verdict);
    KyModel nc = model_noncorrespondence();
    CHECK(eval(nc, "w1", F("[p]Ky{a}q"), Semantics::alt_kyr()).verdict);
  }

  SUBCASE("empty condition set is vacuous under the alternative reading") {
    CHECK(holds_globally(m, F("Kyr{a}(p & ~p, q)"), Semantics::alt_kyr()));
  }
}

TEST_CASE("announcement versus conditional correspondence") {
  SUBCASE("agreement on the two-world model") {
    auto r = check_correspondence(model_m1(), "w1", "a", F("q"), F("p"));
    CHECK(r.announced_ky);
    CHECK(r.kyr_standard);
    CHECK(r.kyr_alt);
    CHECK(r.standard_pair_agrees);
    CHECK(r.alt_pair_agrees);
  }
  SUBCASE("divergence where the announcement is vacuous") {
    auto r = check_correspondence(model_noncorrespondence(), "w1", "a", F("p"), F("q"));
    CHECK(r.announced_ky);
    CHECK(!r.kyr_standard);
    CHECK(r.kyr_alt);
    CHECK(!r.standard_pair_agrees);
    CHECK(r.alt_pair_agrees);
  }
  SUBCASE("divergence from a non-factive extent") {
    auto r = check_correspondence(model_factivity(), "1", "a", F("p"), F("K{a}q"));
    CHECK(r.announced_ky);
    CHECK(!r.kyr_standard);
    CHECK(r.kyr_alt);
    CHECK(!r.standard_pair_agrees);
    CHECK(r.alt_pair_agrees);
  }
}

TEST_CASE("context parameter filters epistemic range without rebuilding") {
  KyModel m = model_m2();
  Semantics under_q = Semantics::with_context(F("q"));
  CHECK(eval(m, "w1", F("K{a}p"), under_q).verdict);
  CHECK(!eval(m, "w1", F("Ky{a}p"), under_q).verdict);
  // the context accumulates through announcements
  Semantics plain_ctx = Semantics::with_context();
  CHECK(eval(m, "w1", F("[q]K{a}p"), plain_ctx).verdict);
  CHECK(!eval(m, "w1", F("[q]Ky{a}p"), plain_ctx).verdict);
  KyModel m1 = model_m1();
  CHECK(eval(m1, "w1", F("[q]Ky{a}p"), plain_ctx).verdict);
  // a context can silence an agent's whole range: K of anything becomes true
  Semantics under_bot = Semantics::with_context(F("p & ~p"));
  CHECK(eval(m, "w1", F("K{a}(p & ~p)"), under_bot).verdict);
  CHECK(eval(m, "w1", F("Ky{a}q"), under_bot).verdict);
}

TEST_CASE("factivity corpus model") {
  KyModel m = model_factivity();
  CHECK(eval(m, "1", F("[p]Ky{a}K{a}q")).verdict);
  KyModel c = factive_companion(m);
  CHECK(!eval(c, "1", F("[p]Ky{a}K{a}q")).verdict);
  REQUIRE(c.explanations().size() == 1);
  CHECK(c.explanations()[0].extent.empty());
}

TEST_CASE("traces list subformulas children first") {
  KyModel m = model_m1();
  auto t = evaluation_trace(m, "w1", F("[q]Ky{a}p"));
  REQUIRE(!t.empty());
  CHECK(t.front().find("true") != std::string::npos);
  CHECK(t.back().find("[q]Ky{a}p") != std::string::npos);
  CHECK(t.back().find("=  true") != std::string::npos);
  bool saw_body = false;
  for (const auto& line : t) saw_body = saw_body || line.find("Ky{a}p  @") == 0;
  CHECK(saw_body);
}

TEST_CASE("evaluation guards") {
  KyModel m = model_m1();
  CHECK_THROWS_AS(eval(m, "w9", F("p")), Error);
  CHECK_THROWS_WITH_AS(eval(m, "w1", F("K{z}p")), doctest::Contains("agent"), Error);
  // atoms outside the signature are simply false
  CHECK(!eval(m, "w1", F("zebra")).verdict);
  CHECK(eval(m, "w1", F("~zebra")).verdict);
  CHECK(truth_set(m, F("p")) == m.full());
  CHECK(truth_set(m, F("q")) == WorldSet(0b01));
  CHECK(holds_globally(m, F("p")));
  CHECK(!holds_globally(m, F("q")));
}
