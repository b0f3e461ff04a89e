#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgetap {

enum class ErrorCode {
  kInvalidShape,
  kInvalidMoments,
  kInvalidBounds,
  kInvalidArgument,
  kDegenerateSample,
  kInvalidCoefficients,
  kNonpositiveVariance,
  kSchema,
  kUnitMismatch,
  kInsufficientData,
  kRankDeficient,
  kNoValidHinge,
  kRegimeCoverage,
  kDegenerateQuadratic,
  kPrecondition,
  kInadmissibleTruth,
  kPresetNotFound,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (CLI exit codes, HTTP status mapping, tests) can branch on kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edgetap
