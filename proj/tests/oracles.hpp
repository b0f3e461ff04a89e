#pragma once

// Independent reference implementations used only by tests.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/owens_t.hpp>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "edgetap/skew_normal.hpp"

namespace oracle {

template <class F>
double integrate(F f, double lo, double hi) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12, &err);
}

inline double owens_t_quadrature(double h, double a) {
  const auto f = [h](double x) { return std::exp(-0.5 * h * h * (1 + x * x)) / (1 + x * x); };
  return integrate(f, 0.0, a) / (2.0 * M_PI);
}

inline double skew_cdf_quadrature(double x, const edgetap::SkewNormalShape& s) {
  const auto f = [&s](double t) { return edgetap::pdf(t, s); };
  // The density is negligible beyond 12 omega on either side of xi.
  const double lo = s.xi - 12.0 * s.omega;
  if (x <= lo) return 0.0;
  // Split at xi where the density has its kink-like sharpening for large alpha.
  if (x <= s.xi) return integrate(f, lo, x);
  return integrate(f, lo, s.xi) + integrate(f, s.xi, x);
}

/// Deterministic (h, a) pairs for randomized property checks.
inline std::vector<std::pair<double, double>> random_pairs(std::size_t n, double h_max,
                                                           double a_max, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> uh(-h_max, h_max), ua(-a_max, a_max);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = uh(gen);
    out.emplace_back(h, ua(gen));
  }
  return out;
}

}  // namespace oracle
