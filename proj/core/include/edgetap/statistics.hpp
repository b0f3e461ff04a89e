#pragma once

#include <cstddef>
#include <span>

namespace edgetap {

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;            ///< n - 1 denominator
  double variance_mle = 0.0;  ///< n denominator
  /// Adjusted Fisher-Pearson skewness G1 = g1 sqrt(n (n-1)) / (n - 2);
  /// zero when n < 3 or the variance vanishes.
  double skewness = 0.0;
};

SampleSummary describe(std::span<const double> xs);

}  // namespace edgetap
