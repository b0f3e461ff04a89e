#include "edgetap/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "edgetap/errors.hpp"

namespace edgetap {
namespace {

constexpr double kPercent = 100.0;

// The fitted coefficients describe the edge-relative frame, which is the
// frame summaries are stored in; evaluate with the edge on the negative side.
TargetCondition edge_relative(const ConditionSummary& s) {
  TargetCondition cond = s.condition;
  cond.edge_side = EdgeSide::kNegative;
  return cond;
}

double near_variance(const TargetCondition& cond, const EdgeModelCoefficients& k) {
  return k.e + k.f * cond.size_mm * cond.size_mm + k.g * cond.margin_mm;
}

double far_variance(const TargetCondition& cond, const EdgeModelCoefficients& k) {
  return k.h + k.i * cond.size_mm * cond.size_mm;
}

double model_variance(const TargetCondition& cond, const EdgeModelCoefficients& k) {
  return regime_of(cond, k) == Regime::kSkewed ? near_variance(cond, k) : far_variance(cond, k);
}

FitReport report_for(std::span<const ConditionSummary> summaries,
                     const std::vector<double>& observed, const std::vector<double>& predicted) {
  FitReport report = compute_metrics(observed, predicted);
  report.per_condition_residuals.reserve(summaries.size());
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    report.per_condition_residuals.push_back(
        {summaries[i].key(), summaries[i].condition.d_edge_mm(), observed[i], predicted[i]});
  }
  return report;
}

std::string describe_condition(const ConditionSummary& s) {
  std::ostringstream out;
  out << "edge=" << to_string(s.edge) << " size_mm=" << s.condition.size_mm
      << " margin_mm=" << s.condition.margin_mm;
  return out.str();
}

// Predictions of every table row for one condition.
struct RowPredictions {
  std::array<double, kAllRows.size()> values{};
};

RowPredictions predict_rows(const ConditionSummary& s, const GaussianCoefficients& gauss,
                            const EdgeModelCoefficients& skew) {
  const TargetCondition cond = edge_relative(s);
  RowPredictions p;
  p.values[0] = gauss.a + gauss.b * cond.size_mm * cond.size_mm;
  p.values[1] = kPercent * gaussian_sr(cond, gauss);
  p.values[2] = predict_gamma1(cond, skew);
  p.values[3] = std::sqrt(std::max(0.0, model_variance(cond, skew)));
  p.values[4] = predict_mu(cond, skew);
  p.values[5] = kPercent * predict_sr(cond, skew).sr;
  return p;
}

std::array<double, kAllRows.size()> observed_rows(const ConditionSummary& s) {
  const TapMoments& m = s.moments;
  return {m.sigma * m.sigma, kPercent * s.observed_sr, m.gamma1, m.sigma, m.mu,
          kPercent * s.observed_sr};
}

}  // namespace

FitReport compute_metrics(std::span<const double> observed, std::span<const double> predicted) {
  if (observed.size() != predicted.size()) {
    throw Error(ErrorCode::kInvalidArgument, "observed and predicted lengths differ");
  }
  FitReport r;
  const std::size_t n = observed.size();
  if (n == 0) return r;
  double mean = 0.0;
  for (double o : observed) mean += o;
  mean /= static_cast<double>(n);

  double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0, ape_sum = 0.0;
  std::size_t ape_n = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = observed[i] - predicted[i];
    ss_res += res * res;
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
    abs_sum += std::abs(res);
    if (observed[i] != 0.0) {
      ape_sum += std::abs(res / observed[i]);
      ++ape_n;
    } else {
      ++r.mape_excluded;
    }
  }
  if (ss_tot > 0.0) {
    r.r2 = 1.0 - ss_res / ss_tot;
  } else {
    r.r2 = ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  }
  r.mae = abs_sum / static_cast<double>(n);
  r.rmse = std::sqrt(ss_res / static_cast<double>(n));
  r.mape = ape_n > 0 ? kPercent * ape_sum / static_cast<double>(ape_n)
                     : std::numeric_limits<double>::quiet_NaN();
  return r;
}

std::vector<double> least_squares(std::span<const double> rows, std::size_t cols,
                                  std::span<const double> y) {
  const std::size_t n = y.size();
  if (cols == 0 || rows.size() != n * cols) {
    throw Error(ErrorCode::kInvalidArgument, "least_squares: design shape mismatch");
  }
  if (n < cols) {
    throw Error(ErrorCode::kRankDeficient, "least_squares: fewer observations than parameters");
  }
  Eigen::MatrixXd x(n, cols);
  Eigen::VectorXd rhs(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < cols; ++c) x(r, c) = rows[r * cols + c];
    rhs(r) = y[r];
  }
  // Scale columns to unit norm so the rank test is independent of units.
  Eigen::VectorXd norms = x.colwise().norm();
  for (std::size_t c = 0; c < cols; ++c) {
    if (norms(c) == 0.0) throw Error(ErrorCode::kRankDeficient, "least_squares: zero column");
    x.col(c) /= norms(c);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(cols)) {
    throw Error(ErrorCode::kRankDeficient, "least_squares: design matrix is rank deficient");
  }
  const Eigen::VectorXd beta = qr.solve(rhs);
  std::vector<double> out(cols);
  for (std::size_t c = 0; c < cols; ++c) out[c] = beta(c) / norms(c);
  return out;
}

GaussianFit fit_gaussian(std::span<const ConditionSummary> summaries) {
  if (summaries.size() < 3) {
    throw Error(ErrorCode::kPrecondition, "Gaussian fit needs at least 3 conditions");
  }
  std::vector<double> design, y;
  for (const auto& s : summaries) {
    design.insert(design.end(), {1.0, s.condition.size_mm * s.condition.size_mm});
    y.push_back(s.moments.sigma * s.moments.sigma);
  }
  std::vector<double> beta;
  try {
    beta = least_squares(design, 2, y);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kRankDeficient) throw;
    throw Error(ErrorCode::kRankDeficient,
                "Gaussian fit needs at least two distinct target sizes");
  }
  GaussianFit fit;
  fit.coeffs = {beta[0], beta[1]};
  std::vector<double> predicted;
  for (const auto& s : summaries) {
    predicted.push_back(fit.coeffs.a + fit.coeffs.b * s.condition.size_mm * s.condition.size_mm);
  }
  fit.report = report_for(summaries, y, predicted);
  return fit;
}

double hinge_sse(std::span<const double> d_edge, std::span<const double> gamma1, double c,
                 double d) {
  double sse = 0.0;
  for (std::size_t i = 0; i < d_edge.size(); ++i) {
    const double r = gamma1[i] - std::max(0.0, c + d * d_edge[i]);
    sse += r * r;
  }
  return sse;
}

HingeFit fit_gamma1(std::span<const ConditionSummary> summaries) {
  if (summaries.size() < 4) {
    throw Error(ErrorCode::kPrecondition, "gamma1 hinge fit needs at least 4 conditions");
  }
  // Summaries are edge-relative, so the sign factor is already +1 for every
  // condition and no further normalization is needed.
  std::vector<double> d_edge, gamma;
  for (const auto& s : summaries) {
    d_edge.push_back(s.condition.d_edge_mm());
    gamma.push_back(s.moments.gamma1);
  }
  std::vector<double> breakpoints = d_edge;
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  bool found = false;
  HingeFit best;
  for (std::size_t t = 1; t < breakpoints.size(); ++t) {
    const double cut = breakpoints[t];
    std::vector<double> design, y;
    for (std::size_t i = 0; i < d_edge.size(); ++i) {
      if (d_edge[i] <= cut) {
        design.insert(design.end(), {1.0, d_edge[i]});
        y.push_back(gamma[i]);
      }
    }
    const std::vector<double> beta = least_squares(design, 2, y);
    if (!(beta[0] > 0.0) || !(beta[1] < 0.0)) continue;
    const double sse = hinge_sse(d_edge, gamma, beta[0], beta[1]);
    if (!found || sse < best.sse) {
      found = true;
      best.c = beta[0];
      best.d = beta[1];
      best.sse = sse;
      best.breakpoint_mm = cut;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kNoValidHinge,
                "no breakpoint candidate yields c > 0 and d < 0; the skewness data show no "
                "edge effect");
  }
  std::vector<double> predicted;
  for (double x : d_edge) predicted.push_back(std::max(0.0, best.c + best.d * x));
  best.report = report_for(summaries, gamma, predicted);
  return best;
}

SigmaFit fit_sigma(std::span<const ConditionSummary> summaries, double c, double d) {
  const EdgeModelCoefficients hinge{.c = c, .d = d};
  const double cut = threshold(hinge);
  std::vector<double> near_design, near_y, far_design, far_y;
  for (const auto& s : summaries) {
    const double s2 = s.condition.size_mm * s.condition.size_mm;
    const double var = s.moments.sigma * s.moments.sigma;
    if (s.condition.d_edge_mm() < cut) {
      near_design.insert(near_design.end(), {1.0, s2, s.condition.margin_mm});
      near_y.push_back(var);
    } else {
      far_design.insert(far_design.end(), {1.0, s2});
      far_y.push_back(var);
    }
  }
  if (near_y.size() < kMinConditionsPerRegime || far_y.size() < kMinConditionsPerRegime) {
    std::ostringstream msg;
    msg << "sigma fit needs at least " << kMinConditionsPerRegime
        << " conditions on each side of -c/d = " << cut << " mm; got " << near_y.size()
        << " near and " << far_y.size() << " far";
    throw Error(ErrorCode::kRegimeCoverage, msg.str());
  }
  const auto near_beta = least_squares(near_design, 3, near_y);
  const auto far_beta = least_squares(far_design, 2, far_y);

  SigmaFit fit;
  fit.e = near_beta[0];
  fit.f = near_beta[1];
  fit.g = near_beta[2];
  fit.h = far_beta[0];
  fit.i = far_beta[1];

  EdgeModelCoefficients k = hinge;
  k.e = fit.e;
  k.f = fit.f;
  k.g = fit.g;
  k.h = fit.h;
  k.i = fit.i;

  std::vector<double> observed, predicted, far_pred;
  for (const auto& s : summaries) {
    const TargetCondition cond = edge_relative(s);
    const double var = model_variance(cond, k);
    if (!(var > 0.0)) {
      fit.nonpositive_variance.push_back(s.key());
      fit.report.warnings.push_back("predicted sigma^2 <= 0 at " + describe_condition(s));
    }
    observed.push_back(s.moments.sigma);
    predicted.push_back(std::sqrt(std::max(0.0, var)));
    if (cond.d_edge_mm() >= cut) far_pred.push_back(far_variance(cond, k));
  }
  std::vector<std::string> warnings = std::move(fit.report.warnings);
  fit.report = report_for(summaries, observed, predicted);
  fit.report.warnings = std::move(warnings);
  fit.far_branch_r2 = compute_metrics(far_y, far_pred).r2;
  return fit;
}

MuFit fit_mu(std::span<const ConditionSummary> summaries, double c, double d) {
  const double cut = threshold({.c = c, .d = d});
  std::vector<double> design, y, distinct;
  for (const auto& s : summaries) {
    const double x = s.condition.d_edge_mm();
    if (x < cut) {
      design.insert(design.end(), {1.0, x, x * x});
      y.push_back(s.moments.mu);
      distinct.push_back(x);
    }
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    std::ostringstream msg;
    msg << "mu fit needs at least 3 distinct near-edge D_edge values below " << cut
        << " mm; got " << distinct.size();
    throw Error(ErrorCode::kRegimeCoverage, msg.str());
  }
  const auto beta = least_squares(design, 3, y);
  if (std::abs(beta[2]) < kMinQuadraticCurvature) {
    throw Error(ErrorCode::kDegenerateQuadratic,
                "mu fit is (nearly) linear in D_edge; the vertex l is undefined");
  }
  MuFit fit;
  fit.k = beta[2];
  fit.l = -beta[1] / (2.0 * beta[2]);
  fit.j = beta[0] - fit.k * fit.l * fit.l;

  std::vector<double> observed, predicted;
  for (const auto& s : summaries) {
    const double x = s.condition.d_edge_mm();
    observed.push_back(s.moments.mu);
    predicted.push_back(x < cut ? fit.j + fit.k * (x - fit.l) * (x - fit.l) : 0.0);
  }
  fit.report = report_for(summaries, observed, predicted);
  return fit;
}

SkewedFit fit_skewed(std::span<const ConditionSummary> summaries) {
  SkewedFit fit;
  fit.gamma1 = fit_gamma1(summaries);
  fit.sigma = fit_sigma(summaries, fit.gamma1.c, fit.gamma1.d);
  fit.mu = fit_mu(summaries, fit.gamma1.c, fit.gamma1.d);
  fit.coeffs = {.c = fit.gamma1.c, .d = fit.gamma1.d,
                .e = fit.sigma.e, .f = fit.sigma.f, .g = fit.sigma.g,
                .h = fit.sigma.h, .i = fit.sigma.i,
                .j = fit.mu.j, .k = fit.mu.k, .l = fit.mu.l};
  return fit;
}

FitReport evaluate_sr(std::span<const ConditionSummary> summaries,
                      const EdgeModelCoefficients& coeffs) {
  std::vector<double> observed, predicted;
  for (const auto& s : summaries) {
    observed.push_back(kPercent * s.observed_sr);
    predicted.push_back(kPercent * predict_sr(edge_relative(s), coeffs).sr);
  }
  return report_for(summaries, observed, predicted);
}

FitReport evaluate_sr(std::span<const ConditionSummary> summaries,
                      const GaussianCoefficients& coeffs) {
  std::vector<double> observed, predicted;
  for (const auto& s : summaries) {
    observed.push_back(kPercent * s.observed_sr);
    predicted.push_back(kPercent * gaussian_sr(s.condition, coeffs));
  }
  return report_for(summaries, observed, predicted);
}

namespace {

template <typename Fn>
auto run_fold(std::span<const ConditionSummary> summaries, std::size_t fold, Fn&& fn) {
  std::vector<ConditionSummary> train;
  train.reserve(summaries.size() - 1);
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    if (i != fold) train.push_back(summaries[i]);
  }
  try {
    return fn(std::span<const ConditionSummary>(train), summaries[fold]);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "LOOCV fold " << fold << " (held out " << describe_condition(summaries[fold])
        << "): " << e.what();
    throw Error(e.code(), msg.str());
  }
}

void require_loocv_size(std::span<const ConditionSummary> summaries) {
  if (summaries.size() < kMinLoocvConditions) {
    std::ostringstream msg;
    msg << "LOOCV needs at least " << kMinLoocvConditions << " conditions, got "
        << summaries.size();
    throw Error(ErrorCode::kPrecondition, msg.str());
  }
}

}  // namespace

LoocvResult loocv(std::span<const ConditionSummary> summaries, Pipeline pipeline) {
  require_loocv_size(summaries);
  std::vector<double> observed, predicted;
  LoocvResult result;
  for (std::size_t fold = 0; fold < summaries.size(); ++fold) {
    const double p = run_fold(summaries, fold, [pipeline](auto train, const ConditionSummary& held) {
      if (pipeline == Pipeline::kGaussian) {
        return gaussian_sr(held.condition, fit_gaussian(train).coeffs);
      }
      return predict_sr(edge_relative(held), fit_skewed(train).coeffs).sr;
    });
    const ConditionSummary& held = summaries[fold];
    observed.push_back(kPercent * held.observed_sr);
    predicted.push_back(kPercent * p);
    result.held_out.push_back(
        {held.key(), held.condition.d_edge_mm(), observed.back(), predicted.back()});
  }
  const FitReport metrics = compute_metrics(observed, predicted);
  result.r2 = metrics.r2;
  result.mae = metrics.mae;
  return result;
}

std::string_view row_id(ModelRow row) noexcept {
  switch (row) {
    case ModelRow::kGaussianSigma2: return "gaussian_sigma2";
    case ModelRow::kGaussianSr: return "gaussian_sr";
    case ModelRow::kGamma1: return "skewed_gamma1";
    case ModelRow::kSigma: return "skewed_sigma";
    case ModelRow::kMu: return "skewed_mu";
    case ModelRow::kSkewedSr: return "skewed_sr";
  }
  return "";
}

std::string_view row_label(ModelRow row) noexcept {
  switch (row) {
    case ModelRow::kGaussianSigma2: return "Gaussian sigma^2";
    case ModelRow::kGaussianSr: return "Gaussian SR";
    case ModelRow::kGamma1: return "Skewed gamma1";
    case ModelRow::kSigma: return "Skewed sigma";
    case ModelRow::kMu: return "Skewed mu";
    case ModelRow::kSkewedSr: return "Skewed SR";
  }
  return "";
}

FullFit fit_all(std::span<const ConditionSummary> summaries) {
  FullFit out;
  const GaussianFit gauss = fit_gaussian(summaries);
  const SkewedFit skew = fit_skewed(summaries);
  out.gaussian = gauss.coeffs;
  out.skewed = skew.coeffs;

  const auto& k = skew.coeffs;
  out.rows = {
      {ModelRow::kGaussianSigma2, {{"a", gauss.coeffs.a}, {"b", gauss.coeffs.b}}, gauss.report},
      {ModelRow::kGaussianSr, {}, evaluate_sr(summaries, gauss.coeffs)},
      {ModelRow::kGamma1, {{"c", k.c}, {"d", k.d}}, skew.gamma1.report},
      {ModelRow::kSigma, {{"e", k.e}, {"f", k.f}, {"g", k.g}, {"h", k.h}, {"i", k.i}},
       skew.sigma.report},
      {ModelRow::kMu, {{"j", k.j}, {"k", k.k}, {"l", k.l}}, skew.mu.report},
      {ModelRow::kSkewedSr, {}, evaluate_sr(summaries, k)},
  };

  if (summaries.size() < kMinLoocvConditions) return out;
  std::array<std::vector<double>, kAllRows.size()> held_obs, held_pred;
  for (std::size_t fold = 0; fold < summaries.size(); ++fold) {
    const RowPredictions p = run_fold(summaries, fold, [](auto train, const ConditionSummary& held) {
      return predict_rows(held, fit_gaussian(train).coeffs, fit_skewed(train).coeffs);
    });
    const auto obs = observed_rows(summaries[fold]);
    for (std::size_t r = 0; r < kAllRows.size(); ++r) {
      held_obs[r].push_back(obs[r]);
      held_pred[r].push_back(p.values[r]);
    }
  }
  for (std::size_t r = 0; r < kAllRows.size(); ++r) {
    const FitReport m = compute_metrics(held_obs[r], held_pred[r]);
    out.rows[r].report.loocv_r2 = m.r2;
    out.rows[r].report.loocv_mae = m.mae;
    out.rows[r].report.has_loocv = true;
  }
  return out;
}

}  // namespace edgetap
