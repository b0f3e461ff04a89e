#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "edgetap/random.hpp"
#include "edgetap/skew_normal.hpp"
#include "edgetap/special_functions.hpp"
#include "edgetap/statistics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using edgetap::ErrorCode;
using edgetap::SkewNormalShape;
using edgetap::TapMoments;
namespace sf = edgetap::special;

namespace {

double ks_distance(std::vector<double> xs, const SkewNormalShape& s) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = edgetap::cdf(xs[i], s);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

/// Mean and standard error of a statistic computed over equal batches.
template <class Stat>
std::pair<double, double> batch_estimate(const std::vector<double>& xs, std::size_t batches,
                                         Stat stat) {
  const std::size_t m = xs.size() / batches;
  std::vector<double> vals;
  for (std::size_t b = 0; b < batches; ++b) {
    vals.push_back(stat(std::span<const double>(xs.data() + b * m, m)));
  }
  const auto s = edgetap::describe(vals);
  return {s.mean, s.sd / std::sqrt(static_cast<double>(batches))};
}

}  // namespace

TEST(SkewNormalPdf, Examples) {
  EXPECT_NEAR(edgetap::pdf(0.0, {0.0, 1.0, 0.0}), 0.3989423, 5e-8);
  EXPECT_NEAR(edgetap::pdf(2.0, {2.0, 3.0, 5.0}), 0.1329808, 5e-8);
  EXPECT_NEAR(edgetap::pdf(2.0, {2.0, 3.0, 5.0}), (2.0 / 3.0) * sf::normal_pdf(0.0) * 0.5, 1e-16);
}

TEST(SkewNormalPdf, IntegratesToOne) {
  const SkewNormalShape s{0.0, 1.0, 4.0};
  EXPECT_NEAR(oracle::integrate([&](double x) { return edgetap::pdf(x, s); }, -40.0, 40.0), 1.0,
              1e-9);
}

TEST(SkewNormalPdf, NonNegativeAndLogConsistent) {
  const SkewNormalShape s{0.3, 0.7, -6.0};
  for (double x = -6.0; x <= 6.0; x += 0.05) {
    const double p = edgetap::pdf(x, s);
    EXPECT_GE(p, 0.0);
    if (p > 1e-300) EXPECT_NEAR(edgetap::log_pdf(x, s), std::log(p), 1e-10 * std::abs(std::log(p)) + 1e-12);
  }
  EXPECT_TRUE(std::isfinite(edgetap::log_pdf(-30.0, {0.0, 1.0, 10.0})));
}

TEST(SkewNormalPdf, RejectsInvalidShape) {
  EXPECT_ERROR_CODE(edgetap::pdf(0.0, {0.0, 0.0, 1.0}), ErrorCode::kInvalidShape);
  EXPECT_ERROR_CODE(edgetap::pdf(0.0, {0.0, -1.0, 1.0}), ErrorCode::kInvalidShape);
  EXPECT_ERROR_CODE(edgetap::cdf(0.0, {0.0, 0.0, 1.0}), ErrorCode::kInvalidShape);
  EXPECT_ERROR_CODE(edgetap::validate(SkewNormalShape{NAN, 1.0, 0.0}), ErrorCode::kInvalidShape);
}

TEST(SkewNormalCdf, Examples) {
  EXPECT_NEAR(edgetap::cdf(0.7, {0.7, 2.0, 1.0}), 0.25, 1e-15);
  EXPECT_NEAR(edgetap::cdf(1.5, {0.0, 1.0, 0.0}), sf::normal_cdf(1.5), 1e-15);
  const SkewNormalShape s{0.0, 1.0, 3.0};
  EXPECT_NEAR(edgetap::cdf(1.0, s), oracle::skew_cdf_quadrature(1.0, s), 1e-8);
  EXPECT_NEAR(edgetap::cdf(1.0, s), 0.6827457365707977, 1e-13);
}

TEST(SkewNormalCdf, MatchesQuadratureOverShapeGrid) {
  for (double alpha : {-10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0}) {
    for (const auto& [xi, omega] : {std::pair{0.0, 1.0}, std::pair{-1.3, 0.4}, std::pair{2.0, 3.5}}) {
      const SkewNormalShape s{xi, omega, alpha};
      for (int k = 0; k <= 40; ++k) {
        const double x = xi - 6.0 * omega + 12.0 * omega * k / 40.0;
        ASSERT_NEAR(edgetap::cdf(x, s), oracle::skew_cdf_quadrature(x, s), 1e-8)
            << "alpha=" << alpha << " x=" << x;
      }
    }
  }
}

TEST(SkewNormalCdf, MonotoneAndBounded) {
  const SkewNormalShape s{0.0, 1.0, 10.0};
  double prev = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    const double v = edgetap::cdf(x, s);
    ASSERT_GE(v, prev);
    ASSERT_LE(v, 1.0);
    prev = v;
  }
}

TEST(IntervalProbability, Examples) {
  const SkewNormalShape s{0.4, 1.3, -2.0};
  EXPECT_EQ(edgetap::interval_probability(0.9, 0.9, s), 0.0);
  EXPECT_NEAR(edgetap::interval_probability(s.xi - 40 * s.omega, s.xi + 40 * s.omega, s), 1.0,
              1e-12);
  EXPECT_ERROR_CODE(edgetap::interval_probability(1.0, 0.0, s), ErrorCode::kInvalidBounds);
}

TEST(IntervalProbability, MatchesMonteCarloAtTenMillion) {
  const SkewNormalShape s{0.0, 1.0, 2.0};
  const auto xs = edgetap::sample(s, 10'000'000, 7);
  const double p = static_cast<double>(std::count_if(xs.begin(), xs.end(), [](double x) {
                     return x >= -1.0 && x <= 1.0;
                   })) / static_cast<double>(xs.size());
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(xs.size()));
  EXPECT_NEAR(edgetap::interval_probability(-1.0, 1.0, s), p, 3 * se);
}

TEST(IntervalProbability, IncreasingInWidth) {
  for (double alpha : {-8.0, 0.0, 2.5}) {
    const SkewNormalShape s{0.3, 0.9, alpha};
    double prev = 0.0;
    for (double w = 0.01; w < 12.0; w *= 1.05) {
      const double p = edgetap::interval_probability(-w / 2, w / 2, s);
      ASSERT_GT(p, prev) << alpha << ' ' << w;
      prev = p;
    }
  }
}

TEST(MomentsToShape, NormalCaseIsExact) {
  const auto s = edgetap::moments_to_shape({3.0, 2.0, 0.0});
  EXPECT_EQ(s.xi, 3.0);
  EXPECT_EQ(s.omega, 2.0);
  EXPECT_EQ(s.alpha, 0.0);
}

TEST(MomentsToShape, ModerateSkew) {
  const auto s = edgetap::moments_to_shape({0.0, 1.0, 0.5});
  EXPECT_NEAR(s.alpha, 2.173, 1e-3);
  EXPECT_NEAR(s.alpha, 2.1737577942043687, 1e-12);
  EXPECT_NEAR(s.omega, 1.45160073488159, 1e-12);
  EXPECT_NEAR(s.xi, -1.0522094342424289, 1e-12);
  const auto back = edgetap::shape_to_moments(s);
  EXPECT_NEAR(back.mu, 0.0, 1e-9);
  EXPECT_NEAR(back.sigma, 1.0, 1e-9);
  EXPECT_NEAR(back.gamma1, 0.5, 1e-9);
}

TEST(MomentsToShape, DeltaIsCapped) {
  const auto s = edgetap::moments_to_shape({0.0, 1.0, 5.0});
  EXPECT_NEAR(edgetap::delta_of(s), 0.999, 1e-12);
  EXPECT_NEAR(s.alpha, 22.34, 5e-3);
  EXPECT_NEAR(s.alpha, 22.343905770087243, 1e-9);
  EXPECT_NEAR(s.omega, 1.655999515835983, 1e-12);
  EXPECT_NEAR(s.xi, -1.3199751499361685, 1e-12);
  const auto neg = edgetap::moments_to_shape({0.0, 1.0, -5.0});
  EXPECT_NEAR(neg.alpha, -s.alpha, 1e-12);
  EXPECT_NEAR(neg.xi, -s.xi, 1e-12);
}

TEST(MomentsToShape, RejectsNonpositiveSigma) {
  EXPECT_ERROR_CODE(edgetap::moments_to_shape({0.0, 0.0, 0.1}), ErrorCode::kInvalidMoments);
  EXPECT_ERROR_CODE(edgetap::moments_to_shape({0.0, -1.0, 0.1}), ErrorCode::kInvalidMoments);
}

TEST(ShapeToMoments, Examples) {
  const auto m = edgetap::shape_to_moments({0.0, 1.0, 0.0});
  EXPECT_EQ(m.mu, 0.0);
  EXPECT_EQ(m.sigma, 1.0);
  EXPECT_EQ(m.gamma1, 0.0);

  const TapMoments in{0.5, 1.2, 0.4};
  const auto rt = edgetap::shape_to_moments(edgetap::moments_to_shape(in));
  EXPECT_NEAR(rt.mu, in.mu, 1e-9);
  EXPECT_NEAR(rt.sigma, in.sigma, 1e-9);
  EXPECT_NEAR(rt.gamma1, in.gamma1, 1e-9);

  const auto big = edgetap::shape_to_moments({1.0, 2.0, 10.0});
  EXPECT_NEAR(big.mu, 2.587849622986429, 1e-12);
  EXPECT_NEAR(big.sigma * big.sigma, 1.4787335747818555, 1e-12);
  EXPECT_NEAR(big.gamma1, 0.9555570924911115, 1e-12);
  EXPECT_LT(big.gamma1, edgetap::max_attainable_skewness());
  // The 0.999 delta cap sits just below the uncapped supremum 0.99527.
  EXPECT_NEAR(edgetap::max_attainable_skewness(), 0.98709896295455812, 1e-12);
  EXPECT_LT(edgetap::max_attainable_skewness(), 0.9953);
}

TEST(ShapeToMoments, MatchesEmpiricalMomentsAtTenMillion) {
  const SkewNormalShape s{1.0, 2.0, 10.0};
  const auto m = edgetap::shape_to_moments(s);
  const auto xs = edgetap::sample(s, 10'000'000, 99);
  const auto [mean, mean_se] =
      batch_estimate(xs, 100, [](auto b) { return edgetap::describe(b).mean; });
  const auto [sd, sd_se] = batch_estimate(xs, 100, [](auto b) { return edgetap::describe(b).sd; });
  const auto [skew, skew_se] =
      batch_estimate(xs, 100, [](auto b) { return edgetap::describe(b).skewness; });
  EXPECT_NEAR(mean, m.mu, 3 * mean_se);
  EXPECT_NEAR(sd, m.sigma, 3 * sd_se);
  EXPECT_NEAR(skew, m.gamma1, 3 * skew_se);
}

TEST(MomentsRoundTrip, IdentityBelowCap) {
  for (double alpha = -12.0; alpha <= 12.0; alpha += 0.25) {
    const SkewNormalShape s{0.37, 1.9, alpha};
    if (std::abs(edgetap::delta_of(s)) > 0.95) continue;
    const auto back = edgetap::moments_to_shape(edgetap::shape_to_moments(s));
    ASSERT_NEAR(back.xi, s.xi, 1e-9) << alpha;
    ASSERT_NEAR(back.omega, s.omega, 1e-9) << alpha;
    ASSERT_NEAR(back.alpha, s.alpha, 1e-9) << alpha;
  }
}

TEST(Sampler, DeterministicForSeed) {
  const SkewNormalShape s{0.0, 1.0, 3.0};
  EXPECT_EQ(edgetap::sample(s, 1000, 42), edgetap::sample(s, 1000, 42));
  EXPECT_NE(edgetap::sample(s, 1000, 42), edgetap::sample(s, 1000, 43));
}

TEST(Sampler, MomentsAtOneMillion) {
  const auto normal = edgetap::describe(edgetap::sample({0.0, 1.0, 0.0}, 1'000'000, 3));
  EXPECT_NEAR(normal.mean, 0.0, 0.005);
  const SkewNormalShape s{0.0, 1.0, 5.0};
  const auto skewed = edgetap::describe(edgetap::sample(s, 1'000'000, 3));
  EXPECT_NEAR(skewed.skewness, edgetap::shape_to_moments(s).gamma1, 0.02);
}

TEST(Sampler, KolmogorovSmirnovBound) {
  const double bound = 1.63 / std::sqrt(1e5);
  for (const SkewNormalShape s : {SkewNormalShape{0, 1, 0}, SkewNormalShape{-0.2, 0.85, 10.2},
                                  SkewNormalShape{1.0, 2.0, -3.0}}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      EXPECT_LT(ks_distance(edgetap::sample(s, 100'000, seed), s), bound)
          << s.xi << ' ' << s.omega << ' ' << s.alpha << " seed " << seed;
    }
  }
}

TEST(Rng, UniformIsInOpenUnitInterval) {
  edgetap::Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  for (int i = 0; i < 1000; ++i) ASSERT_LT(rng.below(7), 7u);
  EXPECT_NE(edgetap::mix_seed(1, 0), edgetap::mix_seed(1, 1));
}

TEST(AlphaZero, CollapsesToNormal) {
  const SkewNormalShape s{0.6, 1.7, 0.0};
  for (double x = -6.0; x <= 6.0; x += 0.1) {
    const double z = (x - s.xi) / s.omega;
    EXPECT_NEAR(edgetap::pdf(x, s), sf::normal_pdf(z) / s.omega, 1e-12);
    EXPECT_NEAR(edgetap::cdf(x, s), sf::normal_cdf(z), 1e-12);
  }
  const auto m = edgetap::shape_to_moments(s);
  EXPECT_NEAR(m.mu, s.xi, 1e-12);
  EXPECT_NEAR(m.sigma, s.omega, 1e-12);
  EXPECT_NEAR(m.gamma1, 0.0, 1e-12);
}

TEST(FitMle, RecoversShape) {
  const auto xs = edgetap::sample({0.0, 1.0, 4.0}, 5000, 11);
  const auto fit = edgetap::fit_mle(xs);
  EXPECT_NEAR(fit.shape.alpha, 4.0, 0.5);
  EXPECT_GE(fit.log_likelihood, fit.initial_log_likelihood);
  EXPECT_NEAR(fit.log_likelihood, edgetap::log_likelihood(xs, fit.shape), 1e-9);
}

TEST(FitMle, NormalDataIsNested) {
  const auto xs = edgetap::sample({0.0, 1.0, 0.0}, 5000, 12);
  const auto fit = edgetap::fit_mle(xs);
  const double ln = edgetap::normal_log_likelihood(xs);
  EXPECT_GE(fit.log_likelihood, ln - 1e-6);
  EXPECT_LT(fit.log_likelihood - ln, 2.0);
  EXPECT_LT(std::abs(fit.shape.alpha), 1.5);
}

TEST(FitMle, RejectsDegenerateSamples) {
  const std::vector<double> constant(20, 1.5);
  EXPECT_ERROR_CODE(edgetap::fit_mle(constant), ErrorCode::kDegenerateSample);
  const std::vector<double> few{1, 2, 3, 4, 5, 6, 7};
  EXPECT_ERROR_CODE(edgetap::fit_mle(few), ErrorCode::kDegenerateSample);
  EXPECT_ERROR_CODE(edgetap::likelihood_ratio_statistic(constant), ErrorCode::kDegenerateSample);
}

TEST(LikelihoodRatio, NullBehaviour) {
  int small = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double lr = edgetap::likelihood_ratio_statistic(edgetap::sample({0, 1, 0}, 5000, seed));
    ASSERT_GE(lr, 0.0);
    if (lr < 6.0) ++small;
  }
  // P(chi2_1 < 6) is about 0.986.
  EXPECT_GE(small, 93);
}

TEST(LikelihoodRatio, StrongSkewIsDetected) {
  EXPECT_GT(edgetap::likelihood_ratio_statistic(edgetap::sample({0, 1, 8}, 5000, 4)), 50.0);
}
