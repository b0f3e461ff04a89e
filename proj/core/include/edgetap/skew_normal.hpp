#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace edgetap {

class Rng;

/// Location / scale / shape parameterization of a skew-normal distribution.
/// Lengths are in millimetres.
struct SkewNormalShape {
  double xi = 0.0;     ///< location
  double omega = 1.0;  ///< scale, > 0
  double alpha = 0.0;  ///< shape; 0 is the normal distribution

  friend bool operator==(const SkewNormalShape&, const SkewNormalShape&) = default;
};

/// Mean, standard deviation and skewness of tap coordinates for one condition,
/// measured relative to the target center.
struct TapMoments {
  double mu = 0.0;
  double sigma = 1.0;
  double gamma1 = 0.0;

  friend bool operator==(const TapMoments&, const TapMoments&) = default;
};

/// |delta| is capped here when converting moments to a shape, since
/// alpha = delta / sqrt(1 - delta^2) diverges at |delta| = 1.
inline constexpr double kDeltaCap = 0.999;

/// Throws Error(kInvalidShape) unless omega > 0 and all fields are finite.
void validate(const SkewNormalShape& shape);

double pdf(double x, const SkewNormalShape& shape);
double log_pdf(double x, const SkewNormalShape& shape);

/// Phi(z) - 2 T(z, alpha) with z = (x - xi) / omega.
double cdf(double x, const SkewNormalShape& shape);

/// P(x1 <= X <= x2). Throws Error(kInvalidBounds) when x1 > x2.
double interval_probability(double x1, double x2, const SkewNormalShape& shape);

/// delta = alpha / sqrt(1 + alpha^2).
double delta_of(const SkewNormalShape& shape);

/// Converts target moments to the skew-normal parameters, capping |delta| at
/// kDeltaCap. Throws Error(kInvalidMoments) when sigma <= 0.
SkewNormalShape moments_to_shape(const TapMoments& moments);

/// Analytic mean, standard deviation and skewness of a shape.
TapMoments shape_to_moments(const SkewNormalShape& shape);

/// Largest |gamma1| representable after the delta cap (about 0.98710; the
/// uncapped supremum is 0.99527).
double max_attainable_skewness();

/// One draw via X = xi + omega (delta |U0| + sqrt(1 - delta^2) U1).
double draw(const SkewNormalShape& shape, Rng& rng);

/// n draws from an Rng seeded with `seed`.
std::vector<double> sample(const SkewNormalShape& shape, std::size_t n,
                           std::uint64_t seed);

double log_likelihood(std::span<const double> samples, const SkewNormalShape& shape);

/// Closed-form maximized log-likelihood of a normal model.
double normal_log_likelihood(std::span<const double> samples);

struct MleFit {
  SkewNormalShape shape;
  double log_likelihood = 0.0;
  /// Log-likelihood at the method-of-moments starting point.
  double initial_log_likelihood = 0.0;
};

inline constexpr std::size_t kMinMleSamples = 8;

/// Maximum-likelihood fit over (xi, log omega, alpha) by Nelder-Mead, started
/// from both the method-of-moments estimate and the normal fit; the better
/// local optimum is returned. Throws Error(kDegenerateSample) for fewer than
/// kMinMleSamples points or zero variance.
MleFit fit_mle(std::span<const double> samples);

/// 2 (l_skew - l_normal), clamped at zero.
double likelihood_ratio_statistic(std::span<const double> samples);

}  // namespace edgetap
