#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "edgetap/experiment_data.hpp"
#include "edgetap/fitting.hpp"
#include "edgetap/preset.hpp"

namespace edgetap {

/// Skew-normal vs normal likelihood-ratio statistic for one condition, on the
/// kept taps pooled over participants.
struct LikelihoodRatioPoint {
  ConditionKey key;
  double d_edge_mm = 0.0;
  std::size_t n = 0;
  double statistic = 0.0;
};

/// Conditions with fewer than kMinMleSamples pooled taps are skipped.
std::vector<LikelihoodRatioPoint> likelihood_ratios(const FilterResult& filtered);

/// Everything produced by a fit run: removal counters, condition summaries,
/// fitted coefficients with per-row metrics, and likelihood ratios.
struct FitDocument {
  std::string name;
  std::string device;
  Edge edge = Edge::kLeft;
  RemovalCounts removal;
  std::vector<ConditionSummary> conditions;
  FullFit fit;
  std::vector<LikelihoodRatioPoint> likelihood_ratio;
  std::vector<std::string> warnings;
};

/// Filter, summarize, fit both models and compute likelihood ratios.
FitDocument analyze(std::vector<TapSample> samples, std::string name, std::string device);

/// The fitted constants as a preset for the document's edge.
Preset to_preset(const FitDocument& doc);

std::string format_fit_document(const FitDocument& doc);
/// Throws Error(kSchema) on malformed documents.
FitDocument parse_fit_document(std::string_view text);

/// Fixed-width table: one line per model row with its constants, R^2, MAE,
/// RMSE, MAPE and LOOCV metrics.
std::string render_fit_table(const FitDocument& doc);

}  // namespace edgetap
