#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edgetap/edge_model.hpp"
#include "edgetap/errors.hpp"
#include "edgetap/preset.hpp"

// Request handling shared by the command-line tool and the HTTP service.
// Both paths call the same functions and serialize with the same JSON writer,
// so identical requests produce identical bytes.
namespace edgetap::api {

inline constexpr std::size_t kMaxCurvePoints = 100'001;

/// A rejected request; `field` names the offending input.
class RequestError : public Error {
 public:
  RequestError(int status, std::string field, const std::string& message)
      : Error(ErrorCode::kInvalidArgument, message), status_(status), field_(std::move(field)) {}
  int status() const noexcept { return status_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int status_;
  std::string field_;
};

struct PredictRequest {
  double size_mm = 0.0;
  double margin_mm = 0.0;
  Edge edge = Edge::kLeft;
  /// Preset name; ignored when inline coefficients are given.
  std::string preset;
  std::optional<std::pair<EdgeModelCoefficients, GaussianCoefficients>> inline_coeffs;
  std::optional<std::size_t> curve_points;
};

struct CurvePoint {
  double x_mm;
  double density;
};

struct PredictResponse {
  std::string preset;  ///< empty for inline coefficients
  Edge edge = Edge::kLeft;
  double size_mm = 0.0;
  double margin_mm = 0.0;
  double d_edge_mm = 0.0;
  double sr = 0.0;
  double gamma1 = 0.0;
  double sigma_mm = 0.0;
  double mu_mm = 0.0;
  SkewNormalShape shape;
  Regime regime = Regime::kGaussian;
  double threshold_mm = 0.0;
  double gaussian_sr = 0.0;
  std::vector<CurvePoint> curve;
};

/// Throws RequestError(400) naming the first invalid field.
PredictRequest parse_predict_request(std::string_view body);
std::string format_predict_request(const PredictRequest& request);

/// Throws RequestError(404) for unknown presets, RequestError(400) when the
/// coefficients cannot produce a prediction for this condition.
PredictResponse predict(const PredictRequest& request, const PresetRegistry& presets);

std::string to_json(const PredictResponse& response);
std::string to_text(const PredictResponse& response);

/// Density of `shape` at `points` evenly spaced abscissae over [x_min, x_max].
std::vector<CurvePoint> density_curve(const SkewNormalShape& shape, double x_min, double x_max,
                                      std::size_t points);

/// Abscissa range used for prediction curves: xi +/- 8 omega, widened to
/// cover the target interval.
std::pair<double, double> curve_range(const SkewNormalShape& shape, double size_mm);

struct Reply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

Reply handle_predict(std::string_view body, const PresetRegistry& presets);
Reply handle_presets(const PresetRegistry& presets);
Reply handle_curve(std::string_view body);
Reply handle_health();

}  // namespace edgetap::api
