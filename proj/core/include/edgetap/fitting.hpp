#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgetap/edge_model.hpp"
#include "edgetap/experiment_data.hpp"

namespace edgetap {

struct Residual {
  ConditionKey key;
  double d_edge_mm = 0.0;
  double observed = 0.0;
  double predicted = 0.0;
};

/// Accuracy of one fitted quantity across conditions. MAE, RMSE and the
/// residuals are in the quantity's reporting unit (percentage points for
/// success rates); MAPE is a percentage.
struct FitReport {
  double r2 = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  double mape = 0.0;
  /// Rows left out of MAPE because the observation is zero.
  std::size_t mape_excluded = 0;
  double loocv_r2 = 0.0;
  double loocv_mae = 0.0;
  bool has_loocv = false;
  std::vector<Residual> per_condition_residuals;
  std::vector<std::string> warnings;
};

/// Unadjusted R^2, MAE, RMSE and MAPE of predicted against observed.
/// R^2 is 1 when both SS_tot and SS_res vanish, -inf when only SS_tot does.
FitReport compute_metrics(std::span<const double> observed, std::span<const double> predicted);

/// Ordinary least squares. Throws Error(kRankDeficient) when the columns of
/// the design are linearly dependent. `rows` is row-major, `cols` wide.
std::vector<double> least_squares(std::span<const double> rows, std::size_t cols,
                                  std::span<const double> y);

struct GaussianFit {
  GaussianCoefficients coeffs;
  FitReport report;  ///< on sigma^2
};

/// OLS of observed sigma^2 on S^2. Needs >= 3 conditions.
GaussianFit fit_gaussian(std::span<const ConditionSummary> summaries);

struct HingeFit {
  double c = 0.0;
  double d = 0.0;
  double sse = 0.0;
  /// Largest edge distance included in the linear segment.
  double breakpoint_mm = 0.0;
  FitReport report;  ///< on gamma1
};

/// Sum of squared errors of max(0, c + d D) against (D, gamma1) pairs.
double hinge_sse(std::span<const double> d_edge, std::span<const double> gamma1, double c,
                 double d);

/// Hinge regression of gamma1 on D_edge by breakpoint scan: for each distinct
/// observed D, the conditions at or below it get an OLS line, everything
/// above is held at zero, and the candidate with the smallest hinge SSE that
/// satisfies c > 0, d < 0 wins. Needs >= 4 conditions. Throws
/// Error(kNoValidHinge) when no candidate satisfies the sign constraints.
HingeFit fit_gamma1(std::span<const ConditionSummary> summaries);

struct SigmaFit {
  double e = 0.0, f = 0.0, g = 0.0, h = 0.0, i = 0.0;
  FitReport report;  ///< on sigma
  /// R^2 on sigma^2 of the far branch over far conditions only.
  double far_branch_r2 = 0.0;
  std::vector<ConditionKey> nonpositive_variance;
};

inline constexpr std::size_t kMinConditionsPerRegime = 3;

/// Piecewise OLS of sigma^2: {1, S^2, Margin} below -c/d, {1, S^2} at or
/// above. Throws Error(kRegimeCoverage) when either side has fewer than
/// kMinConditionsPerRegime conditions.
SigmaFit fit_sigma(std::span<const ConditionSummary> summaries, double c, double d);

struct MuFit {
  double j = 0.0, k = 0.0, l = 0.0;
  FitReport report;  ///< on mu, far conditions predicted as 0
};

inline constexpr double kMinQuadraticCurvature = 1e-9;

/// Quadratic OLS of mu on D_edge over conditions below -c/d, reparameterized
/// to vertex form j + k (D - l)^2. Throws Error(kRegimeCoverage) with fewer
/// than 3 distinct near-edge D values and Error(kDegenerateQuadratic) when
/// the curvature is below kMinQuadraticCurvature.
MuFit fit_mu(std::span<const ConditionSummary> summaries, double c, double d);

struct SkewedFit {
  EdgeModelCoefficients coeffs;
  HingeFit gamma1;
  SigmaFit sigma;
  MuFit mu;
};

/// gamma1 -> sigma -> mu, in that order, since the later fits branch on -c/d.
SkewedFit fit_skewed(std::span<const ConditionSummary> summaries);

/// Predicted vs observed success rate, metrics in percentage points.
FitReport evaluate_sr(std::span<const ConditionSummary> summaries,
                      const EdgeModelCoefficients& coeffs);
FitReport evaluate_sr(std::span<const ConditionSummary> summaries,
                      const GaussianCoefficients& coeffs);

enum class Pipeline { kSkewed, kGaussian };

struct LoocvResult {
  double r2 = 0.0;
  double mae = 0.0;  ///< percentage points
  std::vector<Residual> held_out;
};

inline constexpr std::size_t kMinLoocvConditions = 5;

/// Leave-one-condition-out: refit the whole pipeline without each condition
/// and predict its success rate. Throws Error(kPrecondition) below
/// kMinLoocvConditions; fold failures are rethrown naming the fold.
LoocvResult loocv(std::span<const ConditionSummary> summaries, Pipeline pipeline);

/// The six rows of the model comparison table.
enum class ModelRow { kGaussianSigma2, kGaussianSr, kGamma1, kSigma, kMu, kSkewedSr };
inline constexpr std::array<ModelRow, 6> kAllRows = {ModelRow::kGaussianSigma2,
                                                    ModelRow::kGaussianSr, ModelRow::kGamma1,
                                                    ModelRow::kSigma, ModelRow::kMu,
                                                    ModelRow::kSkewedSr};
std::string_view row_id(ModelRow row) noexcept;     ///< e.g. "skewed_sr"
std::string_view row_label(ModelRow row) noexcept;  ///< e.g. "Skewed SR"

struct RowReport {
  ModelRow row;
  std::vector<std::pair<std::string, double>> constants;
  FitReport report;
};

struct FullFit {
  GaussianCoefficients gaussian;
  EdgeModelCoefficients skewed;
  std::vector<RowReport> rows;
};

/// Fits both models, evaluates all six rows in-sample, and fills each row's
/// LOOCV metrics by refitting on every leave-one-out subset.
FullFit fit_all(std::span<const ConditionSummary> summaries);

}  // namespace edgetap
