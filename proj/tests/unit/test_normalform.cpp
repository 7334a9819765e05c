#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pvg/errors.hpp"
#include "pvg/normalform.hpp"

using namespace pvg;
using namespace pvgtest;

namespace {

Configuration one_token(const Alphabet& A, unsigned bound, const char* loc, ProcType t) {
  Configuration c(bound);
  c.add(parse_location(loc, A, bound), t, 1);
  return c;
}

// φ4 fails exactly when some process has two a's but not two d's, or the
// other way round.
NormalForm phi4_by_hand(const Alphabet& A, unsigned bound) {
  Clause clause;
  for (const Location& l : all_locations(A, bound)) {
    bool a2 = l[0] == 2, d2 = l[1] == 2;
    if (a2 == d2) continue;
    for (ProcType t : kAllTypes) clause.push_back({Count{Cmp::kEq, 0}, t, l});
  }
  return canonicalize(NormalForm{bound, {clause}}, A);
}

}  // namespace

TEST_SUITE("normalform") {

TEST_CASE("threshold") {
  Alphabet A = example1_alphabet();
  CHECK(threshold(Formula::True()) == 1);
  CHECK(threshold(parse_formula(kPhi2, A)) == 2);
  CHECK(threshold(parse_formula(kPhi4, A)) == oracle_rank(parse_formula(kPhi4, A)));
}

TEST_CASE("counting on configurations") {
  Alphabet A({"a"}, {"d"});
  Formula f = parse_formula("A x. ((E==2 y. (x ~ y & a(y))) <-> (E==2 y. (x ~ y & d(y))))", A);
  CHECK(holds_on_config(f, one_token(A, 4, "a^2 d^2", ProcType::kBoth), A));
  CHECK_FALSE(holds_on_config(f, one_token(A, 4, "a^2", ProcType::kSys), A));
  CHECK(holds_on_config(f, one_token(A, 4, "a", ProcType::kSys), A));
  CHECK(holds_on_config(f, Configuration(4), A));
}

TEST_CASE("configuration semantics agree with the canonical execution") {
  std::mt19937_64 rng(3);
  Alphabet A({"a"}, {"b"});
  FormulaGen gen(A, rng);
  for (int i = 0; i < 60; ++i) {
    Formula f = gen.sentence(2);
    unsigned bound = threshold(f);
    Execution x = random_execution(A, rng, rng() % 3, rng() % 3, rng() % 3, 3);
    Configuration c = abstract_execution(x, bound);
    CAPTURE(to_string(f));
    CHECK(holds_on_config(f, c, A) == oracle_holds(x, f));
  }
}

TEST_CASE("normal form of phi4 matches the hand-written one") {
  Alphabet A({"a"}, {"d"});
  Formula f = parse_formula("A x. ((E==2 y. (x ~ y & a(y))) <-> (E==2 y. (x ~ y & d(y))))", A);
  NormalForm nf = canonicalize(normalize(f, A, 3, 1), A);
  CHECK(nf == phi4_by_hand(A, 3));
  for (const Location& l : all_locations(A, 3)) {
    Configuration c(3);
    c.add(l, ProcType::kBoth, 1);
    CHECK(nf_holds(nf, c) == nf_holds(phi4_by_hand(A, 3), c));
  }
}

TEST_CASE("to_formula inverts normal forms on configurations") {
  Alphabet A({"a"}, {"d"});
  NormalForm nf = phi4_by_hand(A, 3);
  Formula back = to_formula(nf, A);
  for (const Location& l : all_locations(A, 3))
    for (ProcType t : kAllTypes) {
      if (!realizable(t, l, A)) continue;
      Configuration c(3);
      c.add(l, t, 2);
      CHECK(holds_on_config(back, c, A, true) == nf_holds(nf, c));
    }
}

TEST_CASE("true normalizes to one empty clause") {
  Alphabet A({"a"}, {"b"});
  NormalForm nf = normalize(Formula::True(), A, 1, 1);
  REQUIRE(nf.clauses.size() == 1);
  CHECK(nf.clauses[0].empty());
  CHECK(normalize(Formula::False(), A, 1, 1).clauses.empty());
}

TEST_CASE("realizability") {
  Alphabet A({"a"}, {"d"});
  CHECK(realizable(ProcType::kSys, parse_location("a", A, 2), A));
  CHECK_FALSE(realizable(ProcType::kSys, parse_location("d", A, 2), A));
  CHECK_FALSE(realizable(ProcType::kEnv, parse_location("a d", A, 2), A));
  CHECK(realizable(ProcType::kBoth, parse_location("a d", A, 2), A));
}

TEST_CASE("satisfiability") {
  Alphabet A = example1_alphabet();
  auto w1 = satisfiable(parse_formula(kPhi1, A), A);
  REQUIRE(w1);
  CHECK(oracle_holds(*w1, parse_formula(kPhi1, A)));
  auto w4 = satisfiable(parse_formula("E x. d(x) & " + std::string(kPhi4), A), A);
  REQUIRE(w4);
  CHECK(oracle_holds(*w4, parse_formula(kPhi4, A)));
  CHECK_FALSE(satisfiable(parse_formula("E x. (a(x) & !a(x))", A), A));
  CHECK_FALSE(satisfiable(parse_formula("E x. (s(x) & c(x))", A), A));
}

TEST_CASE("normalization respects its budget") {
  Alphabet A = example1_alphabet();
  NormalizeOptions o;
  o.budget = 1;
  CHECK_THROWS_AS(normalize(parse_formula(kPhi4, A), A, 4, 2, o), BudgetExceeded);
}

TEST_CASE("counts") {
  CHECK(to_string(Count{Cmp::kEq, 2}) == "=2");
  CHECK(parse_count(">=3") == Count{Cmp::kGe, 3});
  CHECK(Count{}.trivial());
  CHECK_THROWS(parse_count("<2"));
}

}
