#include "edgetap/statistics.hpp"

#include <cmath>
#include <numeric>

namespace edgetap {

SampleSummary describe(std::span<const double> xs) {
  SampleSummary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : xs) {
    const double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  s.variance_mle = m2;
  s.sd = xs.size() > 1 ? std::sqrt(m2 * n / (n - 1.0)) : 0.0;
  if (m2 > 0.0 && xs.size() > 2) {
    s.skewness = m3 / std::pow(m2, 1.5) * std::sqrt(n * (n - 1.0)) / (n - 2.0);
  }
  return s;
}

}  // namespace edgetap
