#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pvg/cutoff.hpp"
#include "pvg/errors.hpp"
#include "pvg/reductions.hpp"

using namespace pvg;
using namespace pvgtest;

namespace {

std::string letters(const ScanResult& r) {
  std::string s;
  for (const auto& w : r.winners) s += !w ? '?' : *w == Winner::kSystem ? 'W' : 'L';
  return s;
}

}  // namespace

TEST_SUITE("cutoff") {

TEST_CASE("bounds match the closed form") {
  struct Case {
    Game g;
    std::uint32_t ke, kse;
  };
  for (const Case& c : {Case{lemma4_game(), 0, 0}, Case{lemma4_game(), 0, 1},
                        Case{lemma5_game(), 1, 0}, Case{example5_game(), 1, 0},
                        Case{tiny_cutoff_game(), 0, 1}}) {
    CutoffBound b = cutoff_bound(c.g, c.ke, c.kse);
    OracleBound o = oracle_cutoff(c.g.alphabet().size(), c.g.alphabet().env_size(), c.g.bound(),
                                  *c.g.max_constant(), c.ke, c.kse);
    CHECK(b.locations == o.locations);
    CHECK(b.Max == o.Max);
    CHECK(b.hatN == o.hatN);
    CHECK_FALSE(b.saturated);
  }
  CHECK(cutoff_bound(lemma4_game(), 0, 0).hatN == 18);
  CHECK(cutoff_bound(lemma4_game(), 0, 1).hatN == 1458);
  CHECK(cutoff_bound(example5_game(), 0, 0).hatN == 0);
  CHECK(cutoff_bound(tiny_cutoff_game(), 0, 1).hatN == 16);
  CHECK(cutoff_bound(lemma4_game(), 50, 50).saturated);
}

TEST_CASE("implicit games need K") {
  Alphabet A({"a"}, {"b"});
  Game g = formula_to_game(parse_formula("A x. (b(x) -> E y. (x ~ y & a(y)))", A), A);
  CHECK_THROWS_AS(cutoff_bound(g, 0, 0), InvalidArgument);
  CHECK(cutoff_bound(g, 0, 0, 3).K == 3);
  CHECK(formula_constant_bound(parse_formula(kPhi4, example1_alphabet())) == 5);
}

TEST_CASE("decisions") {
  Decision d = decide(example5_game(), 0, 0);
  CHECK(d.kind == DecisionKind::kNonempty);
  CHECK(d.witness == 0u);
  Decision e = decide(example5_game(), 1, 0);
  CHECK(e.kind == DecisionKind::kEmpty);
  CHECK_FALSE(e.witness);
  Decision l5 = decide(lemma5_game(), 1, 0);
  CHECK(l5.kind == DecisionKind::kNonempty);
  CHECK(l5.witness == 1u);
  DecideOptions o;
  o.n_max = 1;
  Decision capped = decide(lemma5_game(), 3, 0, o);
  CHECK(capped.kind == DecisionKind::kEmptyUpTo);
  CHECK(capped.instances_solved == 2);
  DecideOptions tight;
  tight.budget = 5;
  CHECK(decide(lemma4_game(), 0, 1, tight).kind == DecisionKind::kInconclusive);
  CHECK(decision_name(DecisionKind::kEmptyUpTo) == "empty-up-to");
}

TEST_CASE("parallel decisions agree") {
  DecideOptions o;
  o.jobs = 4;
  Decision d = decide(lemma5_game(), 2, 0, o);
  CHECK(d.kind == DecisionKind::kNonempty);
  CHECK(d.witness == 2u);
}

TEST_CASE("scans") {
  ScanResult l4 = scan_winning(lemma4_game(), Axis::kSE, {0, 0, 0}, 1, 6);
  CHECK(letters(l4) == "LWLWLW");
  CHECK_FALSE(l4.eventually_constant);
  ScanResult l5 = scan_winning(lemma5_game(), Axis::kS, {0, 2, 0}, 0, 4);
  CHECK(letters(l5) == "LLWWW");
  CHECK(l5.stable_from == 2u);
  CHECK(l5.eventually_constant);
  ScanOptions par;
  par.jobs = 3;
  CHECK(letters(scan_winning(lemma5_game(), Axis::kS, {0, 2, 0}, 0, 4, par)) == "LLWWW");
  CHECK(scan_winning(lemma5_game(), Axis::kE, {0, 0, 0}, 3, 2).winners.empty());
  CHECK(parse_axis("se") == Axis::kSE);
  CHECK_THROWS(parse_axis("x"));
}

TEST_CASE("winners are constant above the tiny game's cutoff") {
  Game g = tiny_cutoff_game();
  std::uint64_t n = cutoff_bound(g, 0, 1).hatN;
  ScanResult r = scan_winning(g, Axis::kS, {0, 0, 1}, static_cast<std::uint32_t>(n),
                              static_cast<std::uint32_t>(n + 2));
  CHECK(r.eventually_constant);
  CHECK(r.stable_from == static_cast<std::uint32_t>(n));
}

}
