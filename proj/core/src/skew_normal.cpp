#include "edgetap/skew_normal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "edgetap/errors.hpp"
#include "edgetap/random.hpp"
#include "edgetap/special_functions.hpp"
#include "edgetap/statistics.hpp"
#include "nelder_mead.hpp"
#include "quadrature.hpp"

namespace edgetap {
namespace {

using special::kPi;

const double kSqrt2OverPi = std::sqrt(2.0 / kPi);
const double kSkewConstant = 0.5 * (4.0 - kPi);

double skewness_from_delta(double delta) {
  const double b = delta * kSqrt2OverPi;
  return kSkewConstant * b * b * b / std::pow(1.0 - b * b, 1.5);
}

void require_fit_input(std::span<const double> samples) {
  if (samples.size() < kMinMleSamples) {
    std::ostringstream msg;
    msg << "skew-normal fit needs at least " << kMinMleSamples << " samples, got "
        << samples.size();
    throw Error(ErrorCode::kDegenerateSample, msg.str());
  }
  for (double x : samples) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kDegenerateSample, "skew-normal fit received a non-finite sample");
    }
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) {
    throw Error(ErrorCode::kDegenerateSample, "skew-normal fit received zero-variance samples");
  }
}

// Lower tail for alpha > 0 and z < 0, where Phi(z) - 2T(z, alpha) cancels.
// Integrates the standardized density up to z, starting where it has fallen
// by a factor e^-40 relative to its value at z.
double standard_lower_tail(double z, double alpha) {
  const auto density = [alpha](double t) {
    return 2.0 * special::normal_pdf(t) * special::normal_cdf(alpha * t);
  };
  const double peak = density(z);
  if (peak == 0.0) return 0.0;
  const double span = -std::abs(z) + std::sqrt(z * z + 80.0 / (1.0 + alpha * alpha));
  // The mass sits within about 1 / ((1 + alpha^2)|z|) of z.
  const double scale = 1.0 / ((1.0 + alpha * alpha) * std::abs(z) + 1.0 / span);
  return detail::integrate_adaptive(density, z - span, z, 1e-14 * peak * scale);
}

}  // namespace

void validate(const SkewNormalShape& shape) {
  if (!std::isfinite(shape.xi) || !std::isfinite(shape.omega) ||
      !std::isfinite(shape.alpha) || !(shape.omega > 0.0)) {
    std::ostringstream msg;
    msg << "invalid skew-normal shape (xi=" << shape.xi << ", omega=" << shape.omega
        << ", alpha=" << shape.alpha << "); omega must be positive and all fields finite";
    throw Error(ErrorCode::kInvalidShape, msg.str());
  }
}

double pdf(double x, const SkewNormalShape& shape) {
  validate(shape);
  const double z = (x - shape.xi) / shape.omega;
  return 2.0 / shape.omega * special::normal_pdf(z) * special::normal_cdf(shape.alpha * z);
}

double log_pdf(double x, const SkewNormalShape& shape) {
  validate(shape);
  const double z = (x - shape.xi) / shape.omega;
  return std::log(2.0 / shape.omega) - special::kLogSqrt2Pi - 0.5 * z * z +
         special::log_normal_cdf(shape.alpha * z);
}

double cdf(double x, const SkewNormalShape& shape) {
  validate(shape);
  const double z = (x - shape.xi) / shape.omega;
  const double phi = special::normal_cdf(z);
  const double value = phi - 2.0 * special::owens_t(z, shape.alpha);
  // Below a thousandth of Phi(z) the difference has lost three or more digits.
  if (z < 0.0 && shape.alpha > 0.0 && value < 1e-3 * phi) {
    return standard_lower_tail(z, shape.alpha);
  }
  return std::clamp(value, 0.0, 1.0);
}

double interval_probability(double x1, double x2, const SkewNormalShape& shape) {
  if (x1 > x2) {
    std::ostringstream msg;
    msg << "interval bounds out of order: x1=" << x1 << " > x2=" << x2;
    throw Error(ErrorCode::kInvalidBounds, msg.str());
  }
  validate(shape);
  if (x1 == x2) return 0.0;
  return std::clamp(cdf(x2, shape) - cdf(x1, shape), 0.0, 1.0);
}

double delta_of(const SkewNormalShape& shape) {
  return shape.alpha / std::sqrt(1.0 + shape.alpha * shape.alpha);
}

SkewNormalShape moments_to_shape(const TapMoments& m) {
  if (!(m.sigma > 0.0) || !std::isfinite(m.sigma) || !std::isfinite(m.mu) ||
      !std::isfinite(m.gamma1)) {
    std::ostringstream msg;
    msg << "invalid tap moments (mu=" << m.mu << ", sigma=" << m.sigma
        << ", gamma1=" << m.gamma1 << "); sigma must be positive";
    throw Error(ErrorCode::kInvalidMoments, msg.str());
  }
  if (m.gamma1 == 0.0) return {m.mu, m.sigma, 0.0};

  const double g23 = std::pow(std::abs(m.gamma1), 2.0 / 3.0);
  const double c23 = std::pow(kSkewConstant, 2.0 / 3.0);
  const double magnitude = std::min(kDeltaCap, std::sqrt(0.5 * kPi * g23 / (g23 + c23)));
  const double delta = std::copysign(magnitude, m.gamma1);

  SkewNormalShape shape;
  shape.alpha = delta / std::sqrt(1.0 - delta * delta);
  shape.omega = m.sigma / std::sqrt(1.0 - 2.0 * delta * delta / kPi);
  shape.xi = m.mu - shape.omega * delta * kSqrt2OverPi;
  return shape;
}

TapMoments shape_to_moments(const SkewNormalShape& shape) {
  validate(shape);
  const double delta = delta_of(shape);
  const double b = delta * kSqrt2OverPi;
  TapMoments m;
  m.mu = shape.xi + shape.omega * b;
  m.sigma = shape.omega * std::sqrt(1.0 - b * b);
  m.gamma1 = skewness_from_delta(delta);
  return m;
}

double max_attainable_skewness() { return skewness_from_delta(kDeltaCap); }

double draw(const SkewNormalShape& shape, Rng& rng) {
  const double delta = delta_of(shape);
  const double u0 = rng.standard_normal();
  const double u1 = rng.standard_normal();
  return shape.xi + shape.omega * (delta * std::abs(u0) + std::sqrt(1.0 - delta * delta) * u1);
}

std::vector<double> sample(const SkewNormalShape& shape, std::size_t n, std::uint64_t seed) {
  validate(shape);
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = draw(shape, rng);
  return out;
}

double log_likelihood(std::span<const double> samples, const SkewNormalShape& shape) {
  validate(shape);
  const double log_norm = std::log(2.0 / shape.omega) - special::kLogSqrt2Pi;
  double total = 0.0;
  for (double x : samples) {
    const double z = (x - shape.xi) / shape.omega;
    total += log_norm - 0.5 * z * z + special::log_normal_cdf(shape.alpha * z);
  }
  return total;
}

double normal_log_likelihood(std::span<const double> samples) {
  const double n = static_cast<double>(samples.size());
  const SampleSummary s = describe(samples);
  return -0.5 * n * (std::log(2.0 * kPi * s.variance_mle) + 1.0);
}

MleFit fit_mle(std::span<const double> samples) {
  require_fit_input(samples);
  const SampleSummary stats = describe(samples);

  using Params = detail::Point<3>;  // xi, log omega, alpha
  const auto objective = [samples](const Params& p) {
    const SkewNormalShape shape{p[0], std::exp(p[1]), p[2]};
    if (!std::isfinite(shape.omega) || !(shape.omega > 0.0)) return HUGE_VAL;
    return -log_likelihood(samples, shape);
  };

  const double capped_skew =
      std::clamp(stats.skewness, -max_attainable_skewness(), max_attainable_skewness());
  const SkewNormalShape mom = moments_to_shape({stats.mean, stats.sd, capped_skew});
  const SkewNormalShape normal{stats.mean, std::sqrt(stats.variance_mle), 0.0};

  MleFit best;
  best.initial_log_likelihood = log_likelihood(samples, mom);
  best.log_likelihood = -HUGE_VAL;

  for (const SkewNormalShape& start : {mom, normal}) {
    const Params x0{start.xi, std::log(start.omega), start.alpha};
    const Params steps{0.25 * stats.sd, 0.1, 0.5 + 0.1 * std::abs(start.alpha)};
    const Params x = detail::nelder_mead<3>(objective, x0, steps);
    const SkewNormalShape shape{x[0], std::exp(x[1]), x[2]};
    const double ll = log_likelihood(samples, shape);
    if (ll > best.log_likelihood) {
      best.shape = shape;
      best.log_likelihood = ll;
    }
  }
  // Fall back to the moment estimate if both searches ended on NaN.
  if (!(best.log_likelihood >= best.initial_log_likelihood)) {
    best.shape = mom;
    best.log_likelihood = best.initial_log_likelihood;
  }
  return best;
}

double likelihood_ratio_statistic(std::span<const double> samples) {
  const MleFit fit = fit_mle(samples);
  const double statistic = 2.0 * (fit.log_likelihood - normal_log_likelihood(samples));
  return std::max(0.0, statistic);
}

}  // namespace edgetap
