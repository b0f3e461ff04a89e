#include "edgetap/special_functions.hpp"

#include <array>
#include <cmath>

#include "quadrature.hpp"

namespace edgetap::special {
namespace {

// W. J. Cody, "Rational Chebyshev approximations for the error function",
// Math. Comp. 23 (1969). Coefficients as distributed in netlib specfun/erf.
constexpr std::array<double, 5> kA = {3.16112374387056560e00, 1.13864154151050156e02,
                                      3.77485237685302021e02, 3.20937758913846947e03,
                                      1.85777706184603153e-1};
constexpr std::array<double, 4> kB = {2.36012909523441209e01, 2.44024637934444173e02,
                                      1.28261652607737228e03, 2.84423683343917062e03};
constexpr std::array<double, 9> kC = {5.64188496988670089e-1, 8.88314979438837594e00,
                                      6.61191906371416295e01, 2.98635138197400131e02,
                                      8.81952221241769090e02, 1.71204761263407058e03,
                                      2.05107837782607147e03, 1.23033935479799725e03,
                                      2.15311535474403846e-8};
constexpr std::array<double, 8> kD = {1.57449261107098347e01, 1.17693950891312499e02,
                                      5.37181101862009858e02, 1.62138957456669019e03,
                                      3.29079923573345963e03, 4.36261909014324716e03,
                                      3.43936767414372164e03, 1.23033935480374942e03};
constexpr std::array<double, 6> kP = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                      1.25781726111229246e-1, 1.60837851487422766e-2,
                                      6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kQ = {2.56852019228982242e00, 1.87295284992346047e00,
                                      5.27905102951428412e-1, 6.05183413124413191e-2,
                                      2.33520497626869185e-3};

constexpr double kSqrtPiInv = 0.56418958354775628695;
constexpr double kThresh = 0.46875;
constexpr double kXSmall = 1.11e-16;
constexpr double kXBig = 26.543;
constexpr double kXHuge = 6.71e7;

enum class Variant { kErf, kErfc, kErfcx };

// exp(-y^2) split as exp(-ysq^2) * exp(-del) to keep full precision.
double scaled_exp_neg_square(double y) {
  const double ysq = std::trunc(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del);
}

// Evaluates erf, erfc or erfcx (= exp(x^2) erfc(x)) for x >= 0 only; callers
// apply the reflection for negative arguments.
double cody_positive(double y, Variant v) {
  if (y <= kThresh) {
    const double ysq = y > kXSmall ? y * y : 0.0;
    double num = kA[4] * ysq;
    double den = ysq;
    for (int i = 0; i < 3; ++i) {
      num = (num + kA[i]) * ysq;
      den = (den + kB[i]) * ysq;
    }
    const double erf_value = y * (num + kA[3]) / (den + kB[3]);
    switch (v) {
      case Variant::kErf: return erf_value;
      case Variant::kErfc: return 1.0 - erf_value;
      case Variant::kErfcx: return std::exp(ysq) * (1.0 - erf_value);
    }
  }

  double result;  // erfcx(y) on this branch
  if (y <= 4.0) {
    double num = kC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + kC[i]) * y;
      den = (den + kD[i]) * y;
    }
    result = (num + kC[7]) / (den + kD[7]);
  } else {
    if (y >= kXBig) {
      if (v == Variant::kErf) return 1.0;
      if (v == Variant::kErfc) return 0.0;
      if (y >= kXHuge) return kSqrtPiInv / y;
    }
    const double inv_sq = 1.0 / (y * y);
    double num = kP[5] * inv_sq;
    double den = inv_sq;
    for (int i = 0; i < 4; ++i) {
      num = (num + kP[i]) * inv_sq;
      den = (den + kQ[i]) * inv_sq;
    }
    result = inv_sq * (num + kP[4]) / (den + kQ[4]);
    result = (kSqrtPiInv - result) / y;
  }

  switch (v) {
    case Variant::kErfcx: return result;
    case Variant::kErfc: return scaled_exp_neg_square(y) * result;
    case Variant::kErf: return (0.5 - scaled_exp_neg_square(y) * result) + 0.5;
  }
  return result;
}

double erfcx(double x) {
  if (x >= 0.0) return cody_positive(x, Variant::kErfcx);
  // erfcx(-y) = 2 exp(y^2) - erfcx(y); only used for moderate y here.
  const double y = -x;
  return 2.0 * std::exp(y * y) - cody_positive(y, Variant::kErfcx);
}

constexpr double kOwenTolerance = 1e-14;

// Direct quadrature of the defining integral for 0 <= a <= 1.
double owens_t_direct(double h, double a) {
  const double half_h2 = 0.5 * h * h;
  const auto integrand = [half_h2](double t) {
    const double one_plus = 1.0 + t * t;
    return std::exp(-half_h2 * one_plus) / one_plus;
  };
  return detail::integrate_adaptive(integrand, 0.0, a, kOwenTolerance * 2.0 * kPi) /
         (2.0 * kPi);
}

}  // namespace

double erf(double x) noexcept {
  const double r = cody_positive(std::abs(x), Variant::kErf);
  return x < 0.0 ? -r : r;
}

double erfc(double x) noexcept {
  if (x >= 0.0) return cody_positive(x, Variant::kErfc);
  return 2.0 - cody_positive(-x, Variant::kErfc);
}

double normal_pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) noexcept {
  // erfc keeps relative precision in the lower tail.
  return z < 0.0 ? 0.5 * erfc(-z / kSqrt2) : 0.5 * (1.0 + erf(z / kSqrt2));
}

double normal_sf(double z) noexcept { return 0.5 * erfc(z / kSqrt2); }

double log_normal_cdf(double z) noexcept {
  if (z > -5.0) {
    // Phi(z) = 1 - Q(z); log1p keeps precision as Phi -> 1.
    return std::log1p(-normal_sf(z));
  }
  const double y = -z / kSqrt2;
  return std::log(0.5 * erfcx(y)) - y * y;
}

double owens_t(double h, double a) noexcept {
  if (a == 0.0) return 0.0;
  if (a < 0.0) return -owens_t(h, -a);
  h = std::abs(h);
  if (h == 0.0) return std::atan(a) / (2.0 * kPi);
  if (a <= 1.0) return owens_t_direct(h, a);

  // Reflection for a > 1 written in upper-tail probabilities:
  // Phi(h)/2 + Phi(ah)/2 - Phi(h)Phi(ah) = Q(h)/2 + Q(ah)/2 - Q(h)Q(ah).
  const double ah = a * h;
  const double q_h = normal_sf(h);
  const double q_ah = normal_sf(ah);
  return 0.5 * q_h + 0.5 * q_ah - q_h * q_ah - owens_t_direct(ah, 1.0 / a);
}

}  // namespace edgetap::special
