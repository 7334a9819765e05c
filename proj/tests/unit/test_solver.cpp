#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pvg/errors.hpp"
#include "pvg/reductions.hpp"

using namespace pvg;
using namespace pvgtest;

namespace {

Winner winner(const Game& g, const Configuration& c, const MoveCaps& caps = {}) {
  SolveOptions o;
  o.caps = caps;
  return solve(g, c, o).verdict.winner;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("lemma4 parity from one token on") {
  Game g = lemma4_game();
  for (std::uint32_t k = 1; k <= 6; ++k) {
    CAPTURE(k);
    CHECK(winner(g, g.initial(0, 0, k)) ==
          (k % 2 == 0 ? Winner::kSystem : Winner::kEnvironment));
  }
}

TEST_CASE("lemma4 strategy") {
  Game g = lemma4_game();
  StrategyFn f = lemma4_strategy(g);
  CHECK(verify_strategy(g, g.initial(0, 0, 4), f).ok);
  CHECK(verify_strategy(g, g.initial(0, 0, 6), f).ok);
  VerifyResult bad = verify_strategy(g, g.initial(0, 0, 3), f);
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.counterexample);
  CHECK(validate_play(g, *bad.counterexample).ok);
}

TEST_CASE("lemma5 grid") {
  Game g = lemma5_game();
  for (std::uint32_t ks = 0; ks <= 2; ++ks)
    for (std::uint32_t ke = 0; ke <= 2; ++ke) {
      CAPTURE(ks);
      CAPTURE(ke);
      CHECK((winner(g, g.initial(ks, ke, 0)) == Winner::kSystem) == (ks >= ke));
    }
  CHECK(verify_strategy(g, g.initial(2, 1, 0), lemma5_strategy(g)).ok);
}

TEST_CASE("example5 game") {
  Game g = example5_game();
  for (std::uint32_t m = 0; m <= 4; ++m) CHECK(winner(g, g.initial(0, 0, m)) == Winner::kSystem);
  CHECK(winner(g, g.initial(0, 1, 0)) == Winner::kEnvironment);
  CHECK(winner(g, g.initial(6, 0, 0)) == Winner::kSystem);
  CHECK(verify_strategy(g, g.initial(0, 0, 4), example5_strategy(g)).ok);
  StrategyFn idle = [](const Configuration&) -> std::optional<Transition> { return std::nullopt; };
  CHECK_FALSE(verify_strategy(g, g.initial(0, 0, 2), idle).ok);
}

TEST_CASE("extracted strategies verify") {
  Game g = example5_game();
  SolveResult r = solve(g, g.initial(0, 0, 3));
  REQUIRE(r.verdict.winner == Winner::kSystem);
  REQUIRE(r.strategy);
  CHECK(verify_strategy(g, g.initial(0, 0, 3), as_function(*r.strategy)).ok);
  Play p = induced_play(g, g.initial(0, 0, 3), as_function(*r.strategy));
  CHECK(validate_play(g, p).ok);
  CHECK(g.accepts(p.last()));
}

TEST_CASE("brute force over executions") {
  Alphabet A({"a"}, {"d"});
  Formula phi2 = parse_formula("A x. (d(x) -> E y. (x ~ y & a(y)))", A);
  CHECK(bruteforce_synthesis(phi2, A, {1, 0, 0}).winner == Winner::kSystem);
  CHECK(bruteforce_synthesis(phi2, A, {0, 1, 0}).winner == Winner::kEnvironment);
  CHECK(bruteforce_synthesis(phi2, A, {0, 0, 1}).winner == Winner::kSystem);
  Game g = formula_to_game(phi2, A);
  for (std::uint32_t s = 0; s <= 1; ++s)
    for (std::uint32_t e = 0; e <= 1; ++e)
      for (std::uint32_t se = 0; se <= 1; ++se)
        CHECK(bruteforce_synthesis(phi2, A, {s, e, se}).winner == winner(g, g.initial(s, e, se)));
}

TEST_CASE("budget") {
  Game g = lemma4_game();
  SolveOptions o;
  o.budget = 3;
  CHECK_THROWS_AS(solve(g, g.initial(0, 0, 4), o), BudgetExceeded);
}

}
