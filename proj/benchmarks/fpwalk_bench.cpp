#include <benchmark/benchmark.h>

#include "fpwalk/barrier.hpp"
#include "fpwalk/first_passage.hpp"
#include "fpwalk/monte_carlo.hpp"
#include "fpwalk/presets.hpp"

using namespace fpwalk;

static void BM_EngineKernels(benchmark::State& state, const char* walk) {
  StepMeasure mu = preset(walk);
  for (auto _ : state) {
    FirstPassageEngine eng(mu);
    benchmark::DoNotOptimize(eng.kernel_stats().iterations);
  }
}
BENCHMARK_CAPTURE(BM_EngineKernels, nn, "nn-uniform-f2")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EngineKernels, powers, "powers-n2-f2")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EngineKernels, antisym, "example-4.1-antisym")->Unit(benchmark::kMillisecond);

static void BM_FirstPassagePower(benchmark::State& state) {
  FirstPassageEngine eng(preset("powers-n2-f2"));
  const Word target = Word::power(1, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eng.first_passage(Word(), target).lower);
}
BENCHMARK(BM_FirstPassagePower)->Arg(1)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_BarrierDecision(benchmark::State& state) {
  FirstPassageEngine eng(preset("example-2.8"));
  std::vector<Word> B{parse_word("a1", 2), parse_word("a1 a2", 2)};
  const Word g = parse_word("a1", 2);
  for (auto _ : state) benchmark::DoNotOptimize(is_barrier(eng, B, g).verdict);
}
BENCHMARK(BM_BarrierDecision)->Unit(benchmark::kMillisecond);

static void BM_MonteCarloFirstPassage(benchmark::State& state) {
  StepMeasure mu = preset("nn-uniform-f2");
  McOptions opts;
  opts.samples = static_cast<std::uint64_t>(state.range(0));
  const Word y = parse_word("a1", 2);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_first_passage(mu, Word(), y, {}, opts).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloFirstPassage)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

static void BM_MonteCarloCylinder(benchmark::State& state) {
  StepMeasure mu = preset("example-4.1-antisym");
  McOptions opts;
  opts.samples = static_cast<std::uint64_t>(state.range(0));
  const Word root = parse_word("a1", 2);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_cylinder(mu, root, 40, opts).at_double.mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloCylinder)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
