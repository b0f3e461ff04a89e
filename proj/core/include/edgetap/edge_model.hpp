#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "edgetap/skew_normal.hpp"

namespace edgetap {

/// Which side of the target center the screen edge lies on, along the
/// constrained axis. negative_side: edge at lower coordinates (left edge, or
/// top edge with y increasing downward); positive_side: the reverse.
enum class EdgeSide { kNegative, kPositive };

/// Physical screen edge. Screen coordinates have x to the right, y downward.
enum class Edge { kLeft, kRight, kTop, kBottom };

EdgeSide side_of(Edge edge) noexcept;
/// "x" for left/right edges, "y" for top/bottom.
std::string_view axis_of(Edge edge) noexcept;
std::string_view to_string(Edge edge) noexcept;
std::string_view to_string(EdgeSide side) noexcept;
std::optional<Edge> parse_edge(std::string_view text) noexcept;

/// +1 when the target center lies at larger coordinates than the edge.
inline double side_sign(EdgeSide side) noexcept {
  return side == EdgeSide::kNegative ? 1.0 : -1.0;
}

struct TargetCondition {
  double size_mm = 1.0;    ///< constrained dimension S (W or H)
  double margin_mm = 0.0;  ///< gap between screen edge and nearest target edge
  EdgeSide edge_side = EdgeSide::kNegative;
  std::string axis_label;  ///< metadata only

  /// Distance from the screen edge to the target center.
  double d_edge_mm() const noexcept { return margin_mm + 0.5 * size_mm; }
};

/// Throws Error(kInvalidArgument) unless size > 0 and margin >= 0 (finite).
void validate(const TargetCondition& cond);

/// Constants of the skewed model; mu constants are edge-relative (positive mu
/// points away from the edge).
struct EdgeModelCoefficients {
  double c = 0.0, d = 0.0;          // gamma1 hinge
  double e = 0.0, f = 0.0, g = 0.0;  // near-edge variance
  double h = 0.0, i = 0.0;          // far variance
  double j = 0.0, k = 0.0, l = 0.0;  // near-edge mean quadratic

  friend bool operator==(const EdgeModelCoefficients&, const EdgeModelCoefficients&) = default;
};

/// Dual Gaussian variance model sigma^2 = a + b S^2.
struct GaussianCoefficients {
  double a = 0.0;  ///< intercept, mm^2
  double b = 0.0;  ///< slope on S^2

  friend bool operator==(const GaussianCoefficients&, const GaussianCoefficients&) = default;
};

enum class Regime { kSkewed, kGaussian };
std::string_view to_string(Regime regime) noexcept;

struct SrPrediction {
  double sr = 0.0;
  double gamma1 = 0.0;
  double sigma_mm = 0.0;
  double mu_mm = 0.0;
  SkewNormalShape shape;
  Regime regime = Regime::kGaussian;
};

/// -c/d, the smallest edge distance at which predicted skewness is zero.
/// Throws Error(kInvalidCoefficients) unless c > 0 and d < 0.
double threshold(const EdgeModelCoefficients& coeffs);

Regime regime_of(const TargetCondition& cond, const EdgeModelCoefficients& coeffs);

/// Skewness in the condition's coordinate frame:
/// side_sign * max(0, c + d D_edge).
double predict_gamma1(const TargetCondition& cond, const EdgeModelCoefficients& coeffs);

/// Piecewise variance model; throws Error(kNonpositiveVariance) when the
/// selected branch yields sigma^2 <= 0.
double predict_sigma(const TargetCondition& cond, const EdgeModelCoefficients& coeffs);

/// Mean tap offset in the condition's coordinate frame. The quadratic is
/// evaluated edge-relative and mirrored for positive_side edges.
double predict_mu(const TargetCondition& cond, const EdgeModelCoefficients& coeffs);

/// Probability that a tap lands in [-S/2, S/2].
SrPrediction predict_sr(const TargetCondition& cond, const EdgeModelCoefficients& coeffs);

/// sqrt(a + b S^2); throws Error(kNonpositiveVariance) when a + b S^2 <= 0.
double gaussian_sigma(const TargetCondition& cond, const GaussianCoefficients& g);

/// erf(S / (2 sqrt 2 sigma)).
double gaussian_sr(const TargetCondition& cond, const GaussianCoefficients& g);

/// Centered-interval success rate of a normal tap distribution.
double gaussian_sr_from_sigma(double size_mm, double sigma_mm);

/// Experimental: product of two independent 1D success rates.
double predict_sr_2d(const TargetCondition& cond_x, const TargetCondition& cond_y,
                     const EdgeModelCoefficients& coeffs_x,
                     const EdgeModelCoefficients& coeffs_y);

}  // namespace edgetap
