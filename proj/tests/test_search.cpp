#include <doctest.h>

#include <kywhy/fixtures.hpp>
#include <kywhy/search.hpp>

#include "generators.hpp"

using namespace kywhy;

namespace {
Formula F(const std::string& s) { return parse_formula(s); }

SearchBounds bounds_with(int worlds, std::vector<std::string> atoms, int extents) {
  SearchBounds b;
  b.max_worlds = worlds;
  b.atoms = std::move(atoms);
  b.max_extents_per_formula = extents;
  return b;
}
}  // namespace

TEST_CASE("frame enumeration counts match the brute force oracle") {
  // over n worlds there are Bell(n) equivalence relations and 2^n valuations
  // of one atom; with no extent targets that is the whole model count
  for (int n : {1, 2, 3}) {
    std::uint64_t frames = testgen::count_equivalence_relations(n);
    auto models = enumerate_models(bounds_with(n, {"p"}, 0));
    CHECK(models.size() == frames * (1ull << n));
  }
  CHECK(testgen::count_equivalence_relations(1) == 1);
  CHECK(testgen::count_equivalence_relations(2) == 2);
  CHECK(testgen::count_equivalence_relations(3) == 5);

  SUBCASE("every enumerated model is distinct and valid") {
    auto models = enumerate_models(bounds_with(2, {"p"}, 0));
    REQUIRE(models.size() == 8);
    for (std::size_t i = 0; i < models.size(); ++i) {
      CHECK(validate_model(models[i]).empty());
      for (std::size_t j = i + 1; j < models.size(); ++j) CHECK(models[i] != models[j]);
    }
  }

  SUBCASE("dropping the partition restriction widens the count") {
    SearchBounds b = bounds_with(1, {"p"}, 0);
    b.s5_frames = false;
    auto models = enumerate_models(b);
    CHECK(models.size() == 4);  // 2 relations x 2 valuations
  }
}

TEST_CASE("extent families multiply the count") {
  // n=3: masks over 3 worlds give 8 extents; families of size <=2 per target:
  // 1 empty + 8 singletons + 28 pairs = 37
  auto models = enumerate_models(bounds_with(3, {"p"}, 2), {F("p")});
  CHECK(models.size() == 5 * 8 * 37);
  int max_entries = 0;
  for (const auto& m : models) max_entries = std::max(max_entries, (int)m.explanations().size());
  CHECK(max_entries == 2);
}

TEST_CASE("budget cap truncates the walk") {
  SearchBounds b = bounds_with(2, {"p"}, 0);
  b.max_models = 5;
  CHECK(enumerate_models(b).size() == 5);

  SUBCASE("the cap also bounds refutation search") {
    Formula f = F("p -> K{a}p");
    SearchBounds tight = bounds_with(2, {"p"}, 0);
    tight.max_models = 3;
    CHECK(!find_countermodel(f, Semantics::standard(), tight).has_value());
    tight.max_models = 4;
    CHECK(find_countermodel(f, Semantics::standard(), tight).has_value());
  }
}

TEST_CASE("first countermodel is pinned by the enumeration order") {
  auto cm = find_countermodel(F("p -> K{a}p"));
  REQUIRE(cm.has_value());
  CHECK(cm->world == "w1");
  KyModel expected({"w1", "w2"}, {"a"}, {"p"});
  expected.set_total("a");
  expected.set_valuation("p", {"w1"});
  CHECK(cm->model == expected);
  REQUIRE(!cm->transcript.empty());
  CHECK(cm->transcript.back().find("false") != std::string::npos);

  SUBCASE("the search is deterministic") {
    auto again = find_countermodel(F("p -> K{a}p"));
    REQUIRE(again.has_value());
    CHECK(again->model == cm->model);
    CHECK(again->world == cm->world);
  }
}

TEST_CASE("fast and general paths agree formula by formula") {
  testgen::FormulaGen gen(77, {"p", "q"}, {"a"});
  SearchBounds b = bounds_with(2, {"p", "q"}, 1);
  for (int i = 0; i < 12; ++i) {
    Formula f = gen.elkyr(3);
    CAPTURE(print_formula(f));
    auto cm = find_countermodel(f, Semantics::standard(), b);

    // reference scan in the same order the search uses
    std::optional<std::pair<KyModel, std::string>> expected;
    for (int n = 1; n <= 2 && !expected; ++n) {
      SearchBounds bn = b;
      bn.max_worlds = n;
      for (const auto& m : enumerate_models(bn, extent_target_formulas(f))) {
        for (const auto& w : m.worlds())
          if (!eval(m, w, f).verdict) {
            expected = {m, w};
            break;
          }
        if (expected) break;
      }
    }

    CHECK(cm.has_value() == expected.has_value());
    if (cm && expected) {
      CHECK(cm->model == expected->first);
      CHECK(cm->world == expected->second);
    }
  }
}

TEST_CASE("announcement formulas take the general path") {
  auto cm = find_countermodel(F("[q]Ky{a}p -> Ky{a}p"), Semantics::standard(),
                              bounds_with(2, {"p", "q"}, 2));
  REQUIRE(cm.has_value());
  CHECK(!eval(cm->model, cm->world, F("[q]Ky{a}p -> Ky{a}p")).verdict);
}

TEST_CASE("variant sensitive refutation") {
  Formula f = F("Kyr{a}(p, K{a}q) -> K{a}(p -> K{a}q)");
  SearchBounds b = bounds_with(2, {"p", "q"}, 2);
  // the standard conditional reads its body in the current model, where the
  // implication schema holds
  CHECK(!find_countermodel(f, Semantics::standard(), b).has_value());
  // the alternative reading evaluates the body after the update and separates
  auto cm = find_countermodel(f, Semantics::alt_kyr(), b);
  REQUIRE(cm.has_value());
  CHECK(!eval(cm->model, cm->world, f, Semantics::alt_kyr()).verdict);
  CHECK(eval(cm->model, cm->world, f).verdict);
}

TEST_CASE("announcement composition under a running context") {
  Semantics ctx = Semantics::with_context();
  SearchBounds b = bounds_with(2, {"p", "q", "r"}, 0);
  Formula law = Formula::iff(F("[p][q]r"), F("[p & q]r"));
  CHECK(!find_countermodel(law, ctx, b).has_value());
  Formula modal = Formula::iff(F("[p][q]K{a}r"), F("[p & q]K{a}r"));
  CHECK(!find_countermodel(modal, ctx, b).has_value());
}

TEST_CASE("equivalence checking") {
  SearchBounds b = bounds_with(2, {"p"}, 2);
  auto same = check_equivalence(F("Ky{a}p"), F("Kyr{a}(top, p)"), Semantics::standard(), b);
  CHECK(same.equivalent);
  CHECK(!same.witness.has_value());

  auto split = check_equivalence(F("Ky{a}p"), F("K{a}p"), Semantics::standard(), b);
  CHECK(!split.equivalent);
  REQUIRE(split.witness.has_value());
  const Countermodel& w = *split.witness;
  CHECK(eval(w.model, w.world, F("K{a}p")).verdict != eval(w.model, w.world, F("Ky{a}p")).verdict);
}

TEST_CASE("seeded sampling") {
  SearchBounds b;
  b.atoms = {"p", "q"};
  auto a1 = sample_models(b, 5, 30, {F("p")});
  auto a2 = sample_models(b, 5, 30, {F("p")});
  auto other = sample_models(b, 6, 30, {F("p")});
  REQUIRE(a1.size() == 30);
  CHECK(a1 == a2);
  CHECK(a1 != other);
  bool all_valid = true;
  int max_entries = 0, max_worlds = 0;
  for (const auto& m : a1) {
    all_valid = all_valid && validate_model(m).empty();
    max_entries = std::max(max_entries, (int)m.explanations().size());
    max_worlds = std::max(max_worlds, m.world_count());
    for (const auto& e : m.explanations()) {
      CHECK(e.formula == F("p"));
      CHECK(print_term(e.term).front() == 'x');
    }
  }
  CHECK(all_valid);
  CHECK(max_entries <= b.max_extents_per_formula);
  CHECK(max_worlds <= b.max_worlds);
  CHECK(max_worlds > 1);  // sizes vary
}

TEST_CASE("bound resolution") {
  SearchBounds b;
  b.atoms = {"p"};
  CHECK_THROWS_WITH_AS(find_countermodel(F("q -> q"), Semantics::standard(), b),
                       doctest::Contains("atom"), Error);
  b.atoms.clear();
  b.agents = {"a"};
  CHECK_THROWS_WITH_AS(find_countermodel(F("K{b}p -> p"), Semantics::standard(), b),
                       doctest::Contains("agent"), Error);
  SearchBounds zero;
  zero.max_worlds = 0;
  CHECK_THROWS_AS(find_countermodel(F("p"), Semantics::standard(), zero), Error);
  // valid inputs admit no countermodel at all
  CHECK(!find_countermodel(F("p -> p")).has_value());
  CHECK(!find_countermodel(F("Ky{a}p -> K{a}p")).has_value());
}
