#include <benchmark/benchmark.h>

#include "edgetap/fitting.hpp"
#include "edgetap/preset.hpp"
#include "edgetap/simulator.hpp"

namespace {

std::vector<edgetap::ConditionSummary> simulated_summaries() {
  edgetap::ExperimentDesign design;
  design.seed = 5;
  std::vector<edgetap::TapSample> samples;
  for (const auto& r : edgetap::generate_experiment(design, edgetap::builtin_left_index_preset().coeffs)) {
    edgetap::TapSample s;
    s.participant_id = r.participant;
    s.set_index = r.set;
    s.trial = r.trial;
    s.edge = r.edge;
    s.condition = {r.size_mm, r.margin_mm, edgetap::side_of(r.edge), "x"};
    s.coord_mm = r.tap_mm;
    s.perpendicular_miss = r.perp_miss;
    s.success = r.success;
    samples.push_back(s);
  }
  return edgetap::summarize(edgetap::filter_outliers(std::move(samples)));
}

void BM_Simulate(benchmark::State& state) {
  const auto truth = edgetap::builtin_left_index_preset().coeffs;
  for (auto _ : state) {
    benchmark::DoNotOptimize(edgetap::generate_experiment({}, truth));
  }
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

void BM_FitSkewed(benchmark::State& state) {
  const auto summaries = simulated_summaries();
  for (auto _ : state) benchmark::DoNotOptimize(edgetap::fit_skewed(summaries));
}
BENCHMARK(BM_FitSkewed)->Unit(benchmark::kMicrosecond);

void BM_FitAllWithLoocv(benchmark::State& state) {
  const auto summaries = simulated_summaries();
  for (auto _ : state) benchmark::DoNotOptimize(edgetap::fit_all(summaries));
}
BENCHMARK(BM_FitAllWithLoocv)->Unit(benchmark::kMillisecond);

}  // namespace
