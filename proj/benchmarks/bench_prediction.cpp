#include <benchmark/benchmark.h>

#include "edgetap/edge_model.hpp"
#include "edgetap/preset.hpp"
#include "edgetap/simulator.hpp"

namespace {

void BM_PredictSr(benchmark::State& state) {
  const auto preset = edgetap::builtin_left_index_preset();
  edgetap::TargetCondition cond{2.339, 0.0, edgetap::EdgeSide::kNegative, "x"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(edgetap::predict_sr(cond, preset.coeffs));
    cond.margin_mm = cond.margin_mm > 10.0 ? 0.0 : cond.margin_mm + 0.1;
  }
}
BENCHMARK(BM_PredictSr);

void BM_MonteCarloSr(benchmark::State& state) {
  const edgetap::SkewNormalShape shape{0.2, 1.1, 3.0};
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(edgetap::monte_carlo_sr(shape, 2.0, n, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloSr)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace
