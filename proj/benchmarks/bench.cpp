#include <benchmark/benchmark.h>

#include "pvg/cutoff.hpp"
#include "pvg/normalform.hpp"
#include "pvg/reductions.hpp"

using namespace pvg;

namespace {

const char* kWord =
    "procs sys=1,2,3 env=4,5 both=6,7,8; "
    "(a,1)(b,8)(d,7)(c,4)(a,6)(c,6)(a,7)(d,6)(b,2)(d,7)(a,7)";
const char* kPhi4 = "A x. ((E==2 y. (x ~ y & a(y))) <-> (E==2 y. (x ~ y & d(y))))";

void BM_SolveLemma4(benchmark::State& st) {
  Game g = lemma4_game();
  SolveOptions o;
  o.extract_strategy = false;
  for (auto _ : st)
    benchmark::DoNotOptimize(solve(g, g.initial(0, 0, st.range(0)), o).verdict.winner);
}
BENCHMARK(BM_SolveLemma4)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_SolveExample5(benchmark::State& st) {
  Game g = example5_game();
  SolveOptions o;
  o.extract_strategy = false;
  for (auto _ : st)
    benchmark::DoNotOptimize(solve(g, g.initial(0, 0, st.range(0)), o).verdict.winner);
}
BENCHMARK(BM_SolveExample5)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_NormalizePhi4(benchmark::State& st) {
  Alphabet A({"a"}, {"d"});
  Formula f = parse_formula(kPhi4, A);
  for (auto _ : st) benchmark::DoNotOptimize(normalize(f, A, 3, 1).clauses.size());
}
BENCHMARK(BM_NormalizePhi4)->Unit(benchmark::kMillisecond);

void BM_ModelCheckPhi4(benchmark::State& st) {
  Alphabet A({"a", "b"}, {"c", "d"});
  Execution w = parse_execution(kWord, A);
  Evaluator eval(parse_formula(kPhi4, A), A);
  for (auto _ : st) benchmark::DoNotOptimize(eval(w));
}
BENCHMARK(BM_ModelCheckPhi4);

void BM_DecideLemma5(benchmark::State& st) {
  Game g = lemma5_game();
  for (auto _ : st) benchmark::DoNotOptimize(decide(g, 2, 0).witness);
}
BENCHMARK(BM_DecideLemma5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
