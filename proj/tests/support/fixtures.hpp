#pragma once

// Inputs shared by the unit and acceptance suites.

#include <string>

#include "pvg/logic.hpp"
#include "pvg/reductions.hpp"

namespace pvgtest {

inline const char* kExample1Alphabet = "sys: a b; env: c d;";
inline const char* kExample1Word =
    "procs sys=1,2,3 env=4,5 both=6,7,8; "
    "(a,1)(b,8)(d,7)(c,4)(a,6)(c,6)(a,7)(d,6)(b,2)(d,7)(a,7)";

inline const char* kPhi1 = "A x. ((s(x) | se(x)) -> E y. (x ~ y & (a(y) | b(y))))";
inline const char* kPhi2 = "A x. (d(x) -> E y. (x ~ y & a(y)))";
inline const char* kPhi3 = "A x. (d(x) -> E y. (x ~ y & x < y & a(y)))";
inline const char* kPhi4 = "A x. ((E==2 y. (x ~ y & a(y))) <-> (E==2 y. (x ~ y & d(y))))";

inline pvg::Alphabet example1_alphabet() { return pvg::parse_alphabet(kExample1Alphabet); }
inline pvg::Execution example1_word() {
  return pvg::parse_execution(kExample1Word, example1_alphabet());
}

inline const char* kMachineM1 = "states q0 qh; init q0; halt qh; t1: q0 --c1==0--> qh;";
inline const char* kMachineStuck = "states q0 qh; init q0; halt qh; t1: q0 --c1----> qh;";
inline const char* kMachineIncHalt =
    "states q0 q1 qh; init q0; halt qh; t1: q0 --c1++--> q1; t2: q1 --c1----> qh;";

/// A_s = {a}, A_e = {b}, B = 1. Accepting: every s token has left ℓ0, some
/// sit at ⟨a⟩ and no shared token is at ℓ0; or a shared token reached ⟨ab⟩
/// and none is stuck at ⟨b⟩.
inline pvg::Game tiny_cutoff_game() {
  using namespace pvg;
  Alphabet A({"a"}, {"b"});
  auto L = [&](const char* s) { return parse_location(s, A, 1); };
  auto C = [](Cmp a, unsigned x, Cmp b, unsigned y, Cmp c, unsigned z) {
    return LocalCondition{{Count{a, x}, Count{b, y}, Count{c, z}}};
  };
  AcceptanceRow r1;
  r1.fallback = LocalCondition::any();
  r1.set(L("0"), C(Cmp::kEq, 0, Cmp::kGe, 0, Cmp::kEq, 0));
  r1.set(L("a"), C(Cmp::kGe, 1, Cmp::kGe, 0, Cmp::kGe, 0));
  AcceptanceRow r2;
  r2.fallback = LocalCondition::any();
  r2.set(L("a b"), C(Cmp::kGe, 0, Cmp::kGe, 0, Cmp::kGe, 1));
  r2.set(L("b"), C(Cmp::kGe, 0, Cmp::kGe, 0, Cmp::kEq, 0));
  return Game::with_rows(A, 1, {r1, r2});
}

}  // namespace pvgtest
