#include "stringtop/harness.hpp"

#include <benchmark/benchmark.h>

using namespace stringtop;

namespace {

const Space torus = Space::torus(2);

void BM_GradedProduct(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<GradedCoefficient::Term> ta, tb;
  for (int k = 0; k < 16; ++k) {
    ta.push_back({static_cast<Mask>(rng() % (1u << n)), Complex(1, k)});
    tb.push_back({static_cast<Mask>(rng() % (1u << n)), Complex(k, 1)});
  }
  const auto a = GradedCoefficient::from_terms(n, ta);
  const auto b = GradedCoefficient::from_terms(n, tb);
  for (auto _ : state)
    benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_GradedProduct)->Arg(6)->Arg(10);

void BM_FuseTraces(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const LieBasis basis(n);
  Rng rng(2);
  auto rnd = [&] {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = {uniform_real(rng, -1, 1), uniform_real(rng, -1, 1)};
    return SuperMatrix::constant(m, 6) + SuperMatrix::monomial(0b11, m, 6);
  };
  const SuperMatrix a1 = rnd(), a2 = rnd(), b1 = rnd(), b2 = rnd();
  for (auto _ : state)
    benchmark::DoNotOptimize(fuse_traces(a1, a2, b1, b2, basis));
}
BENCHMARK(BM_FuseTraces)->DenseRange(1, 4);

void BM_Transport(benchmark::State &state) {
  Rng rng(3);
  const FlatConnection a =
      random_commuting_connection(static_cast<int>(state.range(0)), 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{2, 1}, 5, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(transport(a, l, 0, 1));
}
BENCHMARK(BM_Transport)->Arg(2)->Arg(4);

void BM_WilsonWithField(benchmark::State &state) {
  Rng rng(4);
  const int n = static_cast<int>(state.range(0));
  const FlatConnection a = random_commuting_connection(n, 2, rng);
  const PLLoop l = gen_random_loop(torus, IVec{1, 1}, 4, rng);
  const FieldConfig c = random_field(torus, n, 6, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(wilson(a, c, l));
}
BENCHMARK(BM_WilsonWithField)->Arg(2)->Arg(3);

void BM_StringBracket(benchmark::State &state) {
  Rng rng(5);
  const auto x = StringCycle::single(gen_random_loop(torus, IVec{3, 1}, 6, rng));
  const auto y = StringCycle::single(gen_random_loop(torus, IVec{-1, 2}, 6, rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(string_bracket(x, y));
}
BENCHMARK(BM_StringBracket);

void BM_MainTheorem(benchmark::State &state) {
  Rng rng(6);
  const FlatConnection a = random_commuting_connection(3, 2, rng);
  const auto x = StringCycle::single(gen_random_loop(torus, IVec{2, 1}, 4, rng));
  const auto y = StringCycle::single(gen_random_loop(torus, IVec{-1, 1}, 4, rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(main_theorem_check(x, y, a));
}
BENCHMARK(BM_MainTheorem);

void BM_Check(benchmark::State &state, const char *check) {
  SuiteConfig cfg;
  cfg.instances[check] = 4;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_check(cfg, check));
}
BENCHMARK_CAPTURE(BM_Check, chord_4t, "chord-4t")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Check, fundamental, "fundamental")
    ->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
