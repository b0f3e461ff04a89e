#pragma once

// Scalar special functions used by the distribution layer. All routines are
// pure and reentrant; 64-bit floating point throughout.

namespace edgetap::special {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

/// Error function. Cody's rational Chebyshev approximation (Math. Comp. 1969),
/// absolute error well below 1e-15 in double precision.
double erf(double x) noexcept;

/// Complementary error function with full relative accuracy in the right tail.
double erfc(double x) noexcept;

/// Standard normal density.
double normal_pdf(double z) noexcept;

/// Standard normal CDF, evaluated as (1 + erf(z / sqrt 2)) / 2.
double normal_cdf(double z) noexcept;

/// Upper tail 1 - normal_cdf(z) without cancellation.
double normal_sf(double z) noexcept;

/// log(normal_cdf(z)), accurate far into the left tail.
double log_normal_cdf(double z) noexcept;

/// Owen's T function
///   T(h, a) = 1/(2 pi) * integral_0^a exp(-h^2 (1 + t^2) / 2) / (1 + t^2) dt.
/// |a| <= 1 is integrated directly by adaptive Gauss-Kronrod; |a| > 1 is
/// reduced with T(h, a) = Phi(h)/2 + Phi(ah)/2 - Phi(h) Phi(ah) - T(ah, 1/a).
double owens_t(double h, double a) noexcept;

}  // namespace edgetap::special
