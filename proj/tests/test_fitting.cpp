#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "edgetap/experiment_data.hpp"
#include "edgetap/fitting.hpp"
#include "edgetap/preset.hpp"
#include "edgetap/simulator.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

using namespace edgetap;

namespace {

const EdgeModelCoefficients kTruth = builtin_left_index_preset().coeffs;

void expect_coeffs_near(const EdgeModelCoefficients& got, const EdgeModelCoefficients& want,
                        double tol) {
  EXPECT_NEAR(got.c, want.c, tol);
  EXPECT_NEAR(got.d, want.d, tol);
  EXPECT_NEAR(got.e, want.e, tol);
  EXPECT_NEAR(got.f, want.f, tol);
  EXPECT_NEAR(got.g, want.g, tol);
  EXPECT_NEAR(got.h, want.h, tol);
  EXPECT_NEAR(got.i, want.i, tol);
  EXPECT_NEAR(got.j, want.j, tol);
  EXPECT_NEAR(got.k, want.k, tol);
  EXPECT_NEAR(got.l, want.l, tol);
}

std::vector<ConditionSummary> simulated(std::uint64_t seed, const EdgeModelCoefficients& truth) {
  ExperimentDesign design;
  design.seed = seed;
  std::ostringstream csv;
  write_tap_log(csv, generate_experiment(design, truth));
  std::istringstream in(csv.str());
  return summarize(filter_outliers(load_tap_log(in, {})));
}

}  // namespace

TEST(Metrics, PerfectPrediction) {
  const std::vector<double> y{1, 2, 3, 4};
  const auto r = compute_metrics(y, y);
  EXPECT_EQ(r.r2, 1.0);
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.mape, 0.0);
}

TEST(Metrics, ConstantMeanPredictionHasZeroR2) {
  const std::vector<double> y{1, 2, 3, 6};
  const std::vector<double> p(4, 3.0);
  EXPECT_NEAR(compute_metrics(y, p).r2, 0.0, 1e-15);
}

TEST(Metrics, Identities) {
  const std::vector<double> y{0.0, 2.0, -1.0, 4.0, 0.5};
  const std::vector<double> p{0.3, 1.5, -1.4, 4.2, 1.0};
  const auto r = compute_metrics(y, p);
  double sq = 0.0, ape = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sq += (y[i] - p[i]) * (y[i] - p[i]);
    if (y[i] != 0.0) ape += std::abs((y[i] - p[i]) / y[i]);
  }
  EXPECT_NEAR(r.rmse * r.rmse, sq / 5.0, 1e-15);
  EXPECT_GE(r.rmse, r.mae);
  EXPECT_GE(r.mae, 0.0);
  EXPECT_EQ(r.mape_excluded, 1u);
  EXPECT_NEAR(r.mape, 100.0 * ape / 4.0, 1e-12);
  EXPECT_LE(r.r2, 1.0);
  const std::vector<double> zeros(3, 0.0), ones(3, 1.0);
  EXPECT_TRUE(std::isnan(compute_metrics(zeros, ones).mape));
  EXPECT_EQ(compute_metrics(zeros, ones).mape_excluded, 3u);
}

TEST(LeastSquares, RankDeficiency) {
  const std::vector<double> rows{1, 2, 1, 2, 1, 2};
  const std::vector<double> y{1, 2, 3};
  EXPECT_ERROR_CODE(least_squares(rows, 2, y), ErrorCode::kRankDeficient);
}

TEST(FitGaussian, NoiselessRecovery) {
  const auto data = fixtures::noiseless_gaussian({1.5, 0.02});
  const auto fit = fit_gaussian(data);
  EXPECT_NEAR(fit.coeffs.a, 1.5, 1e-9);
  EXPECT_NEAR(fit.coeffs.b, 0.02, 1e-9);
  EXPECT_NEAR(fit.report.r2, 1.0, 1e-12);
}

TEST(FitGaussian, SingleSizeIsRankDeficient) {
  ExperimentDesign d;
  d.sizes_mm = {2.0};
  EXPECT_ERROR_CODE(fit_gaussian(fixtures::noiseless_gaussian({1.5, 0.02}, d)),
                    ErrorCode::kRankDeficient);
  auto two = fixtures::noiseless_gaussian({1.5, 0.02});
  two.resize(2);
  EXPECT_ERROR_CODE(fit_gaussian(two), ErrorCode::kPrecondition);
}

TEST(FitGamma1, NoiselessRecovery) {
  const auto fit = fit_gamma1(fixtures::noiseless_skewed(kTruth));
  EXPECT_NEAR(fit.c, 1.09, 1e-9);
  EXPECT_NEAR(fit.d, -0.170, 1e-9);
  EXPECT_NEAR(fit.sse, 0.0, 1e-18);
}

TEST(FitGamma1, AllZeroSkewnessHasNoHinge) {
  EXPECT_ERROR_CODE(fit_gamma1(fixtures::noiseless_gaussian({1.5, 0.02})),
                    ErrorCode::kNoValidHinge);
  auto few = fixtures::noiseless_skewed(kTruth);
  few.resize(3);
  EXPECT_ERROR_CODE(fit_gamma1(few), ErrorCode::kPrecondition);
}

TEST(FitGamma1, GlobalMinimumOverBreakpointFamily) {
  const auto data = simulated(3, kTruth);
  const auto fit = fit_gamma1(data);
  // Independent closed-form OLS for every breakpoint candidate.
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> xs, ys;
  for (const auto& s : data) {
    xs.push_back(s.condition.d_edge_mm());
    ys.push_back(s.moments.gamma1);
  }
  for (double cut : xs) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] > cut) continue;
      n += 1; sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    if (n < 2 || n * sxx - sx * sx <= 0) continue;
    const double d = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double c = (sy - d * sx) / n;
    if (!(c > 0 && d < 0)) continue;
    best = std::min(best, hinge_sse(xs, ys, c, d));
  }
  EXPECT_NEAR(fit.sse, best, 1e-12);
  // And no nearby perturbation of (c, d) does better.
  for (double dc : {-0.01, 0.0, 0.01}) {
    for (double dd : {-0.002, 0.0, 0.002}) {
      EXPECT_GE(hinge_sse(xs, ys, fit.c + dc, fit.d + dd), fit.sse - 1e-12);
    }
  }
}

TEST(FitSigma, NoiselessRecovery) {
  const auto fit = fit_sigma(fixtures::noiseless_skewed(kTruth), kTruth.c, kTruth.d);
  EXPECT_NEAR(fit.e, kTruth.e, 1e-9);
  EXPECT_NEAR(fit.f, kTruth.f, 1e-9);
  EXPECT_NEAR(fit.g, kTruth.g, 1e-9);
  EXPECT_NEAR(fit.h, kTruth.h, 1e-9);
  EXPECT_NEAR(fit.i, kTruth.i, 1e-9);
  EXPECT_NEAR(fit.report.r2, 1.0, 1e-12);
  EXPECT_TRUE(fit.nonpositive_variance.empty());
}

TEST(FitSigma, RegimeCoverage) {
  ExperimentDesign d;
  d.margins_mm = {12.477, 15.596, 18.715};
  EXPECT_ERROR_CODE(fit_sigma(fixtures::noiseless_skewed(kTruth, d), kTruth.c, kTruth.d),
                    ErrorCode::kRegimeCoverage);
}

TEST(FitSigma, FlagsNonpositiveVariance) {
  using fixtures::summary_for;
  std::vector<ConditionSummary> data{
      summary_for(1.0, 0.0, {0, 0.01, 0.5}, 0.5),  summary_for(1.0, 1.0, {0, 0.01, 0.5}, 0.5),
      summary_for(1.0, 2.0, {0, 0.01, 0.5}, 0.5),  summary_for(1.0, 3.0, {0, std::sqrt(3.0), 0.5}, 0.5),
      summary_for(1.5, 0.0, {0, 0.7, 0.5}, 0.5),   summary_for(2.0, 5.0, {0, 1.5, 0}, 0.5),
      summary_for(3.0, 6.0, {0, 1.6, 0}, 0.5),     summary_for(4.0, 7.0, {0, 1.8, 0}, 0.5)};
  const auto fit = fit_sigma(data, 5.0, -1.0);
  ASSERT_FALSE(fit.nonpositive_variance.empty());
  EXPECT_EQ(fit.nonpositive_variance.front().margin_mm, 0.0);
  EXPECT_FALSE(fit.report.warnings.empty());
}

TEST(FitMu, NoiselessRecovery) {
  const auto fit = fit_mu(fixtures::noiseless_skewed(kTruth), kTruth.c, kTruth.d);
  EXPECT_NEAR(fit.j, -0.393, 1e-9);
  EXPECT_NEAR(fit.k, 0.108, 1e-9);
  EXPECT_NEAR(fit.l, 3.73, 1e-9);
}

TEST(FitMu, LinearDataIsDegenerate) {
  auto data = fixtures::noiseless_skewed(kTruth);
  for (auto& s : data) s.moments.mu = 0.2 - 0.05 * s.condition.d_edge_mm();
  EXPECT_ERROR_CODE(fit_mu(data, kTruth.c, kTruth.d), ErrorCode::kDegenerateQuadratic);
}

TEST(FitMu, NeedsThreeNearEdgeDistances) {
  ExperimentDesign d;
  d.margins_mm = {0.0, 1.0, 12.477, 15.596, 18.715};
  d.sizes_mm = {1.0};
  auto data = fixtures::noiseless_skewed(kTruth, d);
  EXPECT_ERROR_CODE(fit_mu(data, kTruth.c, kTruth.d), ErrorCode::kRegimeCoverage);
}

TEST(FitSkewed, NoiselessRecoveryOfAllCoefficients) {
  for (const auto& truth : {kTruth, builtin_bottom_index_preset().coeffs}) {
    expect_coeffs_near(fit_skewed(fixtures::noiseless_skewed(truth)).coeffs, truth, 1e-9);
  }
}

TEST(EvaluateSr, PerfectPredictions) {
  const auto data = fixtures::noiseless_skewed(kTruth);
  const auto r = evaluate_sr(data, kTruth);
  EXPECT_NEAR(r.r2, 1.0, 1e-12);
  EXPECT_NEAR(r.mae, 0.0, 1e-12);
  EXPECT_NEAR(r.rmse, 0.0, 1e-12);
  EXPECT_NEAR(r.mape, 0.0, 1e-12);
  EXPECT_EQ(r.per_condition_residuals.size(), data.size());
  const auto g = evaluate_sr(fixtures::noiseless_gaussian({1.5, 0.0236}), GaussianCoefficients{1.5, 0.0236});
  EXPECT_NEAR(g.mae, 0.0, 1e-12);
}

TEST(Loocv, NoiselessMatchesInSample) {
  const auto data = fixtures::noiseless_skewed(kTruth);
  const auto in_sample = evaluate_sr(data, kTruth);
  const auto cv = loocv(data, Pipeline::kSkewed);
  EXPECT_NEAR(cv.r2, in_sample.r2, 1e-9);
  EXPECT_NEAR(cv.mae, in_sample.mae, 1e-9);
  EXPECT_EQ(cv.held_out.size(), data.size());
  const auto g = fixtures::noiseless_gaussian({1.5, 0.0236});
  EXPECT_NEAR(loocv(g, Pipeline::kGaussian).mae, 0.0, 1e-9);
}

TEST(Loocv, NeedsFiveConditions) {
  auto data = fixtures::noiseless_gaussian({1.5, 0.0236});
  data.resize(4);
  EXPECT_ERROR_CODE(loocv(data, Pipeline::kGaussian), ErrorCode::kPrecondition);
}

TEST(Loocv, FoldFailureNamesFold) {
  // One target size: the near-edge variance fit is rank deficient in every fold.
  ExperimentDesign d;
  d.margins_mm = {0.0, 1.0, 2.0, 12.477, 15.596, 18.715};
  d.sizes_mm = {1.0};
  auto data = fixtures::noiseless_skewed(kTruth, d);
  try {
    loocv(data, Pipeline::kSkewed);
    FAIL() << "expected a fold failure";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("fold"), std::string::npos) << e.what();
  }
}

TEST(FitAll, RowsAndNoiselessMetrics) {
  const auto fit = fit_all(fixtures::noiseless_skewed(kTruth));
  ASSERT_EQ(fit.rows.size(), 6u);
  for (std::size_t r = 0; r < 6; ++r) EXPECT_EQ(fit.rows[r].row, kAllRows[r]);
  EXPECT_EQ(row_id(ModelRow::kSkewedSr), "skewed_sr");
  const auto& skewed = fit.rows[5].report;
  EXPECT_NEAR(skewed.r2, 1.0, 1e-9);
  EXPECT_TRUE(skewed.has_loocv);
  EXPECT_NEAR(skewed.loocv_r2, skewed.r2, 1e-9);
  for (std::size_t r = 2; r < 6; ++r) {
    EXPECT_NEAR(fit.rows[r].report.loocv_mae, fit.rows[r].report.mae, 1e-9) << r;
  }
}

TEST(SyntheticRecovery, ThresholdAndVertexOverTwentySeeds) {
  // Per-participant skewness from 24 taps is attenuated by the estimator and
  // the 3 SD trim, which scales c and d alike: -c/d stays centred on the truth
  // but single seeds scatter with an SD near 0.4 mm.
  double mean_threshold = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fit = fit_skewed(simulated(seed, kTruth));
    mean_threshold += threshold(fit.coeffs) / 20.0;
    EXPECT_NEAR(fit.coeffs.l, 3.73, 1.0) << "seed " << seed;
  }
  EXPECT_NEAR(mean_threshold, 6.41, 0.75);
}

TEST(SyntheticRecovery, SuccessRatePredictionsTrackTruth) {
  const auto data = simulated(17, kTruth);
  const auto fit = fit_skewed(data);
  double mae = 0.0;
  for (const auto& s : data) {
    const TargetCondition c = s.condition;
    mae += std::abs(predict_sr(c, fit.coeffs).sr - predict_sr(c, kTruth).sr);
  }
  EXPECT_LT(100.0 * mae / static_cast<double>(data.size()), 2.0);
}

TEST(SyntheticRecovery, GaussianFitMissesNearEdgeVarianceStructure) {
  const auto data = simulated(5, kTruth);
  const auto gauss = fit_gaussian(data);
  const auto hinge = fit_gamma1(data);
  const auto sigma = fit_sigma(data, hinge.c, hinge.d);
  EXPECT_LT(gauss.report.r2, 0.9);
  EXPECT_GT(sigma.far_branch_r2, gauss.report.r2);
}
