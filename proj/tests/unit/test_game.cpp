#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pvg/errors.hpp"
#include "pvg/reductions.hpp"

using namespace pvg;
using namespace pvgtest;

TEST_SUITE("game") {

TEST_CASE("example5 acceptance") {
  Game g = example5_game();
  const Alphabet& A = g.alphabet();
  auto single = [&](const char* l) {
    Configuration c(3);
    c.add(parse_location(l, A, 3), ProcType::kBoth, 1);
    return c;
  };
  CHECK(g.accepts(g.initial(0, 0, 5)));
  CHECK(g.accepts(single("a^2 d^2")));
  CHECK_FALSE(g.accepts(single("a^2")));
  CHECK_FALSE(g.accepts(single("a^3 d^2")));
  CHECK(g.accepts(single("a^3 d^3")));
  CHECK(example5_red_locations(A).size() == 6);
}

TEST_CASE("lemma4 rows") {
  Game g = lemma4_game();
  std::size_t above = 0;
  for (const Location& l : all_locations(g.alphabet(), 2))
    if (l[1] > l[0]) ++above;
  CHECK(g.rows().size() == 5 + above);
  CHECK(g.rows().size() == 8);
  CHECK(g.max_constant() == 2u);
  CHECK_FALSE(g.accepts(g.initial(0, 0, 0)));
}

TEST_CASE("transitions merge and order their moves") {
  Alphabet A({"a"}, {"b"});
  Location l0 = zero_location(A), la = parse_location("a", A, 2);
  Transition t1(Side::kSystem, {{l0, la, {1, 0, 0}}, {l0, la, {0, 0, 1}}}, A, 2);
  Transition t2(Side::kSystem, {{l0, la, {0, 0, 1}}, {l0, la, {1, 0, 0}}}, A, 2);
  CHECK(t1 == t2);
  REQUIRE(t1.moves().size() == 1);
  CHECK(t1.moves()[0].n == Triple{1, 0, 1});
  CHECK_THROWS(Transition(Side::kSystem, {{l0, parse_location("b", A, 2), {1, 0, 0}}}, A, 2));
  CHECK_THROWS(Transition(Side::kEnvironment, {{l0, parse_location("b", A, 2), {1, 0, 0}}}, A, 2));
}

TEST_CASE("apply composes token moves") {
  Alphabet A({"a"}, {"b"});
  Configuration c = initial_configuration(A, 2, 0, 0, 3);
  Location l0 = zero_location(A), la = parse_location("a", A, 2), la2 = parse_location("a^2", A, 2);
  Transition t(Side::kSystem, {{l0, la, {0, 0, 2}}}, A, 2);
  CHECK(applicable(t, c));
  Configuration r = apply(t, c);
  CHECK(r.at(l0) == Triple{0, 0, 1});
  CHECK(r.at(la) == Triple{0, 0, 2});
  Transition u(Side::kSystem, {{la, la2, {0, 0, 3}}}, A, 2);
  CHECK_FALSE(applicable(u, r));
  CHECK(r.totals() == c.totals());
}

TEST_CASE("lemma4 legal moves from three shared tokens") {
  Game g = lemma4_game();
  const Alphabet& A = g.alphabet();
  Configuration c = g.initial(0, 0, 3);
  Location l0 = zero_location(A), la = parse_location("a", A, 2);
  Transition two(Side::kSystem, {{l0, la, {0, 0, 2}}}, A, 2);
  bool found = false;
  for (const LegalMove& m : legal_moves(g, c, Side::kSystem, {}))
    if (m.transition == two) {
      found = true;
      CHECK(m.result == apply(two, c));
    }
  CHECK(found);
}

TEST_CASE("moves never stay in place") {
  for (const Game& g : {lemma4_game(), example5_game(), tiny_cutoff_game()}) {
    Configuration c = g.initial(1, 1, 2);
    for (Side side : {Side::kSystem, Side::kEnvironment})
      for (const LegalMove& m : legal_moves(g, c, side, {2, 2})) {
        CHECK(m.result != c);
        CHECK(m.transition.side() == side);
        for (const Move& mv : m.transition.moves()) CHECK(mv.from != mv.to);
      }
  }
}

TEST_CASE("move caps bound what a move may do") {
  Game g = lemma4_game();
  Configuration c = g.initial(0, 0, 3);
  for (const LegalMove& m : legal_moves(g, c, Side::kSystem, {1, 1})) {
    std::uint64_t tokens = 0;
    for (const Move& mv : m.transition.moves()) {
      tokens += mv.n[0] + mv.n[1] + mv.n[2];
      CHECK(letter_sum(mv.to) - letter_sum(mv.from) == 1);
    }
    CHECK(tokens == 1);
  }
}

TEST_CASE("play validation") {
  Game g = example5_game();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    Play p = random_play(g, g.initial(0, 1, 2), rng, {2, 2});
    CHECK(validate_play(g, p).ok);
  }
  Play bad;
  bad.initial = g.initial(0, 0, 1);
  Location l0 = g.origin(), ld = parse_location("d", g.alphabet(), 3);
  Transition env(Side::kEnvironment, {{l0, ld, {0, 0, 1}}}, g.alphabet(), 3);
  bad.steps.emplace_back(env, apply(env, bad.initial));
  CHECK_FALSE(validate_play(g, bad).ok);
  Play late_pass;
  late_pass.initial = g.initial(0, 0, 1);
  Transition sys(Side::kSystem, {{l0, parse_location("a", g.alphabet(), 3), {0, 0, 1}}},
                 g.alphabet(), 3);
  late_pass.steps.emplace_back(sys, apply(sys, late_pass.initial));
  late_pass.steps.emplace_back(Transition::pass(Side::kEnvironment), late_pass.last());
  CHECK_FALSE(validate_play(g, late_pass).ok);
}

TEST_CASE("malformed games are rejected") {
  Alphabet A({"a"}, {"b"});
  Location l0 = zero_location(A);
  AcceptanceRow r;
  r.set(l0, LocalCondition::any());
  CHECK_THROWS_AS(Game::with_rows(A, 0, {r}), InvalidArgument);
  AcceptanceRow far;
  far.set(parse_location("a^3", A, 3), LocalCondition::any());
  CHECK_THROWS_AS(Game::with_rows(A, 2, {far}), InvalidArgument);
  Game g = Game::with_rows(A, 2, {r});
  CHECK_THROWS(g.accepts(initial_configuration(A, 3, 1, 0, 0)));
}

TEST_CASE("family rows") {
  Game g = lemma4_game();
  const Alphabet& A = g.alphabet();
  CHECK(in_family(LocationFamily::kEnvExceedsSys, parse_location("b", A, 2), A));
  CHECK_FALSE(in_family(LocationFamily::kEnvExceedsSys, parse_location("a b", A, 2), A));
  Configuration c(2);
  c.add(parse_location("a b^2", A, 2), ProcType::kBoth, 1);
  c.add(zero_location(A), ProcType::kBoth, 1);
  CHECK(g.accepts(c));
}

}
