#include "edgetap/errors.hpp"

namespace edgetap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidShape: return "invalid_shape";
    case ErrorCode::kInvalidMoments: return "invalid_moments";
    case ErrorCode::kInvalidBounds: return "invalid_bounds";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDegenerateSample: return "degenerate_sample";
    case ErrorCode::kInvalidCoefficients: return "invalid_coefficients";
    case ErrorCode::kNonpositiveVariance: return "nonpositive_variance";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kUnitMismatch: return "unit_mismatch";
    case ErrorCode::kInsufficientData: return "insufficient_data";
    case ErrorCode::kRankDeficient: return "rank_deficient";
    case ErrorCode::kNoValidHinge: return "no_valid_hinge";
    case ErrorCode::kRegimeCoverage: return "regime_coverage";
    case ErrorCode::kDegenerateQuadratic: return "degenerate_quadratic";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kInadmissibleTruth: return "inadmissible_truth";
    case ErrorCode::kPresetNotFound: return "preset_not_found";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace edgetap
