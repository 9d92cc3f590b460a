#include <benchmark/benchmark.h>

#include "gridshield/cas.hpp"
#include "gridshield/protect.hpp"
#include "test_support.hpp"

namespace gs = gridshield;

namespace {

void BM_OptimalProtectionSynthetic(benchmark::State& state) {
  const auto cas = gs::testing::synthetic_cas(272, 526, 4);
  const int x = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gs::optimal_protection(cas, x).consecutive_excluded);
}
BENCHMARK(BM_OptimalProtectionSynthetic)->DenseRange(1, 8)->Unit(benchmark::kMicrosecond);

void BM_OptimalProtectionIeee30(benchmark::State& state) {
  static const auto cas =
      gs::enumerate_cas(gs::testing::load_data_grid("ieee30"), 2, gs::StopRule::unbounded());
  const int x = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gs::optimal_protection(cas, x).consecutive_excluded);
}
BENCHMARK(BM_OptimalProtectionIeee30)->DenseRange(1, 5)->Unit(benchmark::kMicrosecond);

void BM_EnumerateAlternatives(benchmark::State& state) {
  const auto cas = gs::testing::synthetic_cas(272, 526, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(gs::enumerate_optimal_protections(cas, 3, 50).size());
}
BENCHMARK(BM_EnumerateAlternatives)->Unit(benchmark::kMillisecond);

}  // namespace
