#include "edgetap/edge_model.hpp"

#include <cmath>
#include <sstream>

#include "edgetap/errors.hpp"
#include "edgetap/special_functions.hpp"

namespace edgetap {

EdgeSide side_of(Edge edge) noexcept {
  return edge == Edge::kLeft || edge == Edge::kTop ? EdgeSide::kNegative : EdgeSide::kPositive;
}

std::string_view axis_of(Edge edge) noexcept {
  return edge == Edge::kLeft || edge == Edge::kRight ? "x" : "y";
}

std::string_view to_string(Edge edge) noexcept {
  switch (edge) {
    case Edge::kLeft: return "left";
    case Edge::kRight: return "right";
    case Edge::kTop: return "top";
    case Edge::kBottom: return "bottom";
  }
  return "left";
}

std::string_view to_string(EdgeSide side) noexcept {
  return side == EdgeSide::kNegative ? "negative_side" : "positive_side";
}

std::optional<Edge> parse_edge(std::string_view text) noexcept {
  if (text == "left") return Edge::kLeft;
  if (text == "right") return Edge::kRight;
  if (text == "top") return Edge::kTop;
  if (text == "bottom") return Edge::kBottom;
  return std::nullopt;
}

std::string_view to_string(Regime regime) noexcept {
  return regime == Regime::kSkewed ? "skewed" : "gaussian";
}

void validate(const TargetCondition& cond) {
  if (!std::isfinite(cond.size_mm) || !(cond.size_mm > 0.0)) {
    std::ostringstream msg;
    msg << "size_mm must be positive, got " << cond.size_mm;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  if (!std::isfinite(cond.margin_mm) || !(cond.margin_mm >= 0.0)) {
    std::ostringstream msg;
    msg << "margin_mm must be non-negative, got " << cond.margin_mm;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

double threshold(const EdgeModelCoefficients& coeffs) {
  if (!(coeffs.c > 0.0) || !(coeffs.d < 0.0)) {
    std::ostringstream msg;
    msg << "edge model needs c > 0 and d < 0, got c=" << coeffs.c << ", d=" << coeffs.d;
    throw Error(ErrorCode::kInvalidCoefficients, msg.str());
  }
  return -coeffs.c / coeffs.d;
}

Regime regime_of(const TargetCondition& cond, const EdgeModelCoefficients& coeffs) {
  validate(cond);
  return cond.d_edge_mm() < threshold(coeffs) ? Regime::kSkewed : Regime::kGaussian;
}

double predict_gamma1(const TargetCondition& cond, const EdgeModelCoefficients& coeffs) {
  if (regime_of(cond, coeffs) == Regime::kGaussian) return 0.0;
  const double magnitude = std::max(0.0, coeffs.c + coeffs.d * cond.d_edge_mm());
  return side_sign(cond.edge_side) * magnitude;
}

double predict_sigma(const TargetCondition& cond, const EdgeModelCoefficients& coeffs) {
  const double s2 = cond.size_mm * cond.size_mm;
  const double variance = regime_of(cond, coeffs) == Regime::kSkewed
                              ? coeffs.e + coeffs.f * s2 + coeffs.g * cond.margin_mm
                              : coeffs.h + coeffs.i * s2;
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    std::ostringstream msg;
    msg << "predicted variance " << variance << " is not positive for size_mm="
        << cond.size_mm << ", margin_mm=" << cond.margin_mm;
    throw Error(ErrorCode::kNonpositiveVariance, msg.str());
  }
  return std::sqrt(variance);
}

double predict_mu(const TargetCondition& cond, const EdgeModelCoefficients& coeffs) {
  if (regime_of(cond, coeffs) == Regime::kGaussian) return 0.0;
  const double offset = cond.d_edge_mm() - coeffs.l;
  return side_sign(cond.edge_side) * (coeffs.j + coeffs.k * offset * offset);
}

SrPrediction predict_sr(const TargetCondition& cond, const EdgeModelCoefficients& coeffs) {
  SrPrediction out;
  out.regime = regime_of(cond, coeffs);
  out.gamma1 = predict_gamma1(cond, coeffs);
  out.sigma_mm = predict_sigma(cond, coeffs);
  out.mu_mm = predict_mu(cond, coeffs);
  out.shape = moments_to_shape({out.mu_mm, out.sigma_mm, out.gamma1});
  const double half = 0.5 * cond.size_mm;
  out.sr = interval_probability(-half, half, out.shape);
  return out;
}

double gaussian_sr_from_sigma(double size_mm, double sigma_mm) {
  if (size_mm <= 0.0) return 0.0;
  if (sigma_mm <= 0.0) return 1.0;
  return special::erf(size_mm / (2.0 * special::kSqrt2 * sigma_mm));
}

double gaussian_sigma(const TargetCondition& cond, const GaussianCoefficients& g) {
  const double variance = g.a + g.b * cond.size_mm * cond.size_mm;
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    std::ostringstream msg;
    msg << "Gaussian variance " << variance << " is not positive for size_mm=" << cond.size_mm;
    throw Error(ErrorCode::kNonpositiveVariance, msg.str());
  }
  return std::sqrt(variance);
}

double gaussian_sr(const TargetCondition& cond, const GaussianCoefficients& g) {
  return gaussian_sr_from_sigma(cond.size_mm, gaussian_sigma(cond, g));
}

double predict_sr_2d(const TargetCondition& cond_x, const TargetCondition& cond_y,
                     const EdgeModelCoefficients& coeffs_x,
                     const EdgeModelCoefficients& coeffs_y) {
  return predict_sr(cond_x, coeffs_x).sr * predict_sr(cond_y, coeffs_y).sr;
}

}  // namespace edgetap
