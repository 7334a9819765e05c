#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pvg/errors.hpp"
#include "pvg/logic.hpp"

using namespace pvg;
using namespace pvgtest;

TEST_SUITE("logic") {

TEST_CASE("phi2 parses to the expected tree") {
  Alphabet A = example1_alphabet();
  Formula f = parse_formula(kPhi2, A);
  Formula expect = Formula::Forall(
      "x", Formula::Implies(Formula::Action("d", "x"),
                            Formula::Exists("y", Formula::And(Formula::Sim("x", "y"),
                                                              Formula::Action("a", "y")))));
  CHECK(f == expect);
  CHECK(parse_formula(to_string(f), A) == f);
}

TEST_CASE("counting at least zero is true") {
  Alphabet A({"a"}, {"b"});
  Execution empty(A, ProcessUniverse::with_sizes(0, 0, 0), {});
  CHECK(model_check(empty, parse_formula("E>=0 y. a(y)", A)));
  CHECK(model_check(empty, parse_formula("E>=0 y. false", A)));
  CHECK_FALSE(model_check(empty, parse_formula("E>=1 y. true", A)));
}

TEST_CASE("truth values on the running example") {
  Alphabet A = example1_alphabet();
  Execution w = example1_word();
  CHECK_FALSE(model_check(w, parse_formula(kPhi1, A)));
  CHECK(model_check(w, parse_formula(kPhi2, A)));
  CHECK_FALSE(model_check(w, parse_formula(kPhi3, A)));
  CHECK(model_check(w, parse_formula(kPhi4, A)));
}

TEST_CASE("quantifier rank of phi4") {
  Alphabet A = example1_alphabet();
  Formula f = parse_formula(kPhi4, A);
  CHECK(quantifier_rank(f) == oracle_rank(f));
  CHECK(quantifier_rank(f) == 4);
  CHECK(quantifier_rank(expand_counting(f)) == 4);
}

TEST_CASE("reversing a word keeps it similar") {
  Execution w = example1_word();
  std::vector<Event> ev(w.events().rbegin(), w.events().rend());
  Execution r(w.alphabet(), w.universe(), ev);
  CHECK(letter_multisets(w) == letter_multisets(r));
  CHECK(similar(w, r));
  std::vector<Event> moved = w.events();
  moved[0].process = 2;
  CHECK_FALSE(similar(w, Execution(w.alphabet(), w.universe(), moved)));
}

TEST_CASE("fragments") {
  Alphabet A = example1_alphabet();
  CHECK(fragment_check(parse_formula(kPhi4, A), {Relation::kSim}));
  CHECK_FALSE(fragment_check(parse_formula(kPhi3, A), {Relation::kSim}));
  CHECK(fragment_check(parse_formula(kPhi3, A), {Relation::kSim, Relation::kLess}));
  CHECK_FALSE(fragment_check(parse_formula("E x. E y. +1(x, y)", A), {Relation::kLess}));
}

TEST_CASE("parse errors") {
  Alphabet A = example1_alphabet();
  CHECK_THROWS_AS(parse_formula("A x. (q(x))", A), ParseError);
  CHECK_THROWS_AS(parse_formula("A x. (a(x)", A), ParseError);
  CHECK_THROWS_AS(parse_formula("a(z)", A), Error);
  CHECK_THROWS_AS(parse_alphabet("sys: a; env: a;"), Error);
  CHECK_THROWS_AS(parse_execution("procs sys=1 env=2 both=; (c,1)", A), Error);
}

TEST_CASE("free variables and actions") {
  Alphabet A = example1_alphabet();
  Formula f = parse_formula("a(x) & E y. x ~ y", A, {"x"});
  CHECK(free_variables(f) == std::set<std::string>{"x"});
  CHECK(actions_used(f) == std::set<std::string>{"a"});
  Interpretation i{{"x", Element::position(1)}};
  CHECK(model_check(example1_word(), f, i));
}

TEST_CASE("execution text round trip") {
  Execution w = example1_word();
  CHECK(parse_execution(to_string(w), w.alphabet()) == w);
  CHECK(w.length() == 11);
  CHECK(w.at(2).process == 8);
}

TEST_CASE("model checker agrees with the naive oracle") {
  std::mt19937_64 rng(1);
  Alphabet A({"a", "b"}, {"c"});
  FormulaGen gen(A, rng);
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.sentence(1 + i % 3);
    Execution x = random_execution(A, rng, rng() % 3, rng() % 3, rng() % 3, 3);
    CAPTURE(to_string(f));
    CAPTURE(to_string(x));
    CHECK(model_check(x, f) == oracle_holds(x, f));
  }
}

TEST_CASE("order relations against the oracle on the running example") {
  Alphabet A = example1_alphabet();
  Execution w = example1_word();
  for (const char* s : {kPhi3, "E x. E y. (+1(x, y) & a(x) & b(y))",
                        "A x. A y. ((x < y & x ~ y) -> !(d(x) & c(y)))",
                        "E x. E y. (+1(x, y) & x ~ y)"})
    CHECK(model_check(w, parse_formula(s, A)) == oracle_holds(w, parse_formula(s, A)));
}

}
