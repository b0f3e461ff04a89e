#include <benchmark/benchmark.h>

#include "edgetap/skew_normal.hpp"
#include "edgetap/special_functions.hpp"

namespace {

void BM_Erf(benchmark::State& state) {
  double x = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(edgetap::special::erf(x));
    x = x > 4.0 ? -4.0 : x + 0.013;
  }
}
BENCHMARK(BM_Erf);

void BM_OwensT(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0)) / 4.0;
  double h = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(edgetap::special::owens_t(h, a));
    h = h > 5.0 ? 0.0 : h + 0.017;
  }
}
BENCHMARK(BM_OwensT)->Arg(1)->Arg(4)->Arg(40);

void BM_SkewNormalCdf(benchmark::State& state) {
  const edgetap::SkewNormalShape shape{0.2, 1.1, 3.0};
  double x = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(edgetap::cdf(x, shape));
    x = x > 3.0 ? -3.0 : x + 0.011;
  }
}
BENCHMARK(BM_SkewNormalCdf);

}  // namespace
