#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pvg/errors.hpp"
#include "pvg/reductions.hpp"

using namespace pvg;
using namespace pvgtest;

TEST_SUITE("reductions") {

TEST_CASE("two-counter machine syntax") {
  TwoCounterMachine m = parse_2cm(kMachineIncHalt);
  CHECK(m.states.size() == 3);
  REQUIRE(m.transitions.size() == 2);
  CHECK(m.transitions[0].op == TcmOpKind::kInc);
  CHECK(m.transitions[1].op == TcmOpKind::kDec);
  CHECK(op_name(m.transitions[1]) == "c1--");
  CHECK(parse_2cm(to_string(m)) == m);
  CHECK(parse_2cm(to_string(parse_2cm(kMachineM1))) == parse_2cm(kMachineM1));
  CHECK_THROWS_AS(parse_2cm("states q0; init q0; halt qh;"), Error);
  CHECK_THROWS_AS(parse_2cm("states q0 qh; init q0; halt qh; t1: q0 --c3++--> qh;"), Error);
  CHECK_THROWS_AS(parse_2cm("states q0 qh; init q0; halt qh; t1 q0 qh"), Error);
}

TEST_CASE("bounded runs against breadth-first search") {
  for (const char* text : {kMachineM1, kMachineStuck, kMachineIncHalt,
                           "states q0 q1 q2 qh; init q0; halt qh; t1: q0 --c1++--> q1; "
                           "t2: q1 --c2++--> q2; t3: q2 --c1----> q0; t4: q2 --c2==0--> qh;"}) {
    TwoCounterMachine m = parse_2cm(text);
    auto oracle = oracle_halting_length(m, 10);
    auto run = tcm_run_bounded(m, 10);
    CAPTURE(text);
    CHECK(run.has_value() == oracle.has_value());
    if (run && oracle) {
      CHECK(run->size() == *oracle);
      TcmConfiguration c{m.initial, 0, 0};
      for (const TcmStep& s : *run) {
        auto n = tcm_apply(m, c, s.transition);
        REQUIRE(n);
        CHECK(*n == s.after);
        c = *n;
      }
      CHECK(c.state == m.halting);
    }
  }
  CHECK(oracle_halting_length(parse_2cm(kMachineIncHalt), 10) == 2u);
}

TEST_CASE("encoding M1") {
  TwoCounterMachine m = parse_2cm(kMachineM1);
  Game g = encode_2cm(m);
  CHECK(g.alphabet().sys_size() == 5);
  CHECK(g.bound() == 4);
  auto run = tcm_run_bounded(m, 4);
  REQUIRE(run);
  StrategyFn f = tcm_strategy(m, *run);
  CHECK_FALSE(encodes(g, m, g.initial(0, 0, 4), {m.initial, 0, 0}));
  Play p = induced_play(g, g.initial(0, 0, 4), f);
  CHECK(validate_play(g, p).ok);
  bool halted = false;
  for (const Configuration& c : p.configurations())
    halted = halted || encodes(g, m, c, run->back().after);
  CHECK(halted);
  CHECK_FALSE(verify_strategy(g, g.initial(0, 0, 2), f).ok);
  CHECK(verify_strategy(g, g.initial(0, 0, 4), f).ok);
  CHECK(verify_strategy(g, g.initial(0, 0, 7), f).ok);
}

TEST_CASE("the stuck machine has no winning System under caps") {
  Game g = encode_2cm(parse_2cm(kMachineStuck));
  SolveOptions o;
  o.caps = {4, 1};
  for (std::uint32_t k = 0; k <= 4; ++k)
    CHECK(solve(g, g.initial(0, 0, k), o).verdict.winner == Winner::kEnvironment);
}

TEST_CASE("executions and plays") {
  Alphabet A({"a"}, {"d"});
  Formula phi = parse_formula("A x. ((E==2 y. (x ~ y & a(y))) <-> (E==2 y. (x ~ y & d(y))))", A);
  Game g = formula_to_game(phi, A);
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    Play p = random_play(g, g.initial(rng() % 2, rng() % 2, 1 + rng() % 2), rng, {2, 2});
    if (p.steps.size() == 1 && p.steps[0].first.empty()) continue;
    Execution w = play_to_execution(p, g);
    CHECK(abstract_execution(w, g.bound()) == p.last());
    CHECK(model_check(w, phi) == g.accepts(p.last()));
    Play back = execution_to_play(w, g);
    CHECK(validate_play(g, back).ok);
    CHECK(back.configurations() == p.configurations());
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("games back to formulas") {
  std::mt19937_64 rng(8);
  for (const Game& g : {lemma5_game(), example5_game(), tiny_cutoff_game()}) {
    Formula f = game_to_formula(g);
    for (int i = 0; i < 30; ++i) {
      Play p = random_play(g, g.initial(rng() % 3, rng() % 3, rng() % 3), rng, {2, 2});
      for (const Configuration& c : p.configurations())
        CHECK(holds_on_config(f, c, g.alphabet(), true) == g.accepts(c));
    }
  }
}

TEST_CASE("compiled formula games") {
  Alphabet A({"a"}, {"d"});
  Formula phi = parse_formula("A x. (d(x) -> E y. (x ~ y & a(y)))", A);
  Game implicit = formula_to_game(phi, A);
  Game expl = formula_to_game_explicit(phi, A);
  CHECK_FALSE(implicit.is_explicit());
  CHECK(expl.is_explicit());
  for (std::uint32_t m = 0; m <= 2; ++m)
    CHECK(solve(implicit, implicit.initial(0, 1, m)).verdict.winner ==
          solve(expl, expl.initial(0, 1, m)).verdict.winner);
}

TEST_CASE("lemma5 rows") {
  Game g = lemma5_game();
  REQUIRE(g.rows().size() == 4);
  CHECK(g.rows()[3].condition_at(g.origin()) == LocalCondition::none());
  CHECK(g.rows()[0].fallback == LocalCondition{{Count{Cmp::kGe, 0}, Count{Cmp::kGe, 0},
                                                Count{Cmp::kEq, 0}}});
}

TEST_CASE("library") {
  for (const std::string& n : library_names()) {
    Game g = library_game(n);
    CHECK(g.is_explicit());
    CHECK(library_strategy(n, g));
  }
  CHECK_THROWS_AS(library_game("nope"), InvalidArgument);
}

}
