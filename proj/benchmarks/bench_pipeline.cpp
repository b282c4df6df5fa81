/* SPDX-License-Identifier: Apache-2.0 */
#include <benchmark/benchmark.h>

#include <string>

#include "prrtail/benchmark.hpp"
#include "prrtail/decider.hpp"
#include "prrtail/simulator.hpp"
#include "prrtail/strengthener.hpp"
#include "prrtail/synthesizer.hpp"

namespace {

using namespace prrtail;

BenchmarkSpec spec_of(const std::string& name) {
  return load_benchmark(std::string(PRRTAIL_CORPUS_DIR) + "/" + name + ".json");
}

void BM_Synthesize(benchmark::State& state, const std::string& name) {
  BenchmarkSpec spec = spec_of(name);
  CanonicalPrr c = spec.load();
  Poly kappa = spec.kappa_poly(), ep = spec.ep_poly();
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(c, kappa, ep));
}

void BM_StrengthenQuickSort(benchmark::State& state) {
  CanonicalPrr c = spec_of("quicksort").load();
  Poly f = parse_poly("4*n*ln(n)"), t = parse_poly("n^-1");
  const int Q = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(strengthen(c, f, t, Q));
}

void BM_DecideQuickSelect(benchmark::State& state) {
  CanonicalPrr c = spec_of("quickselect").load();
  CanonicalConstraint q = strengthen(c, parse_poly("2*alpha*ln(alpha)^-1*n"), parse_poly("ln(alpha)*n^-1"), 8);
  for (auto _ : state) benchmark::DoNotOptimize(decide(q));
}

void BM_SampleQuickSort(benchmark::State& state) {
  CanonicalPrr c = spec_of("quicksort").load();
  const long n = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_costs(c, n, 1000, seed++, 1));
  state.SetItemsProcessed(state.iterations() * 1000);
}

}  // namespace

BENCHMARK_CAPTURE(BM_Synthesize, quickselect, std::string("quickselect"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Synthesize, quicksort, std::string("quicksort"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Synthesize, l2diameter, std::string("l2diameter"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Synthesize, mc3, std::string("mc3"))->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StrengthenQuickSort)->Arg(1)->Arg(8)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DecideQuickSelect)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SampleQuickSort)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
