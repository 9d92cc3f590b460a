#include <benchmark/benchmark.h>

#include "gridshield/cas.hpp"
#include "gridshield/dcopf.hpp"
#include "test_support.hpp"

namespace gs = gridshield;

namespace {

void BM_DispatchSolve(benchmark::State& state, const char* grid_name) {
  const auto g = gs::testing::load_data_grid(grid_name);
  const gs::DcopfModel model(g);
  const auto comps = g.attackable_components();
  gs::AttackVector attack;
  attack.insert(comps.front());
  attack.insert(comps.back());
  for (auto _ : state) benchmark::DoNotOptimize(model.solve(attack).lost_load_mw);
}
BENCHMARK_CAPTURE(BM_DispatchSolve, ieee9, "ieee9");
BENCHMARK_CAPTURE(BM_DispatchSolve, ieee30, "ieee30");
BENCHMARK_CAPTURE(BM_DispatchSolve, cigre_mv, "cigre_mv");

void BM_EnumerateIeee9(benchmark::State& state) {
  const auto g = gs::testing::load_data_grid("ieee9");
  const int z = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(gs::enumerate_cas(g, z, gs::StopRule::unbounded(), 1).records.size());
}
BENCHMARK(BM_EnumerateIeee9)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
