#pragma once

#include <vector>

#include "edgetap/edge_model.hpp"
#include "edgetap/experiment_data.hpp"
#include "edgetap/preset.hpp"
#include "edgetap/simulator.hpp"

namespace fixtures {

inline edgetap::ConditionSummary summary_for(double size, double margin, edgetap::TapMoments m,
                                             double sr) {
  edgetap::ConditionSummary s;
  s.edge = edgetap::Edge::kLeft;
  s.condition = edgetap::ConditionKey{s.edge, size, margin}.condition();
  s.n_participants = 15;
  s.n_kept = 360;
  s.moments = m;
  s.observed_sr = sr;
  return s;
}

/// Condition summaries that follow the skewed model exactly.
inline std::vector<edgetap::ConditionSummary> noiseless_skewed(
    const edgetap::EdgeModelCoefficients& k, const edgetap::ExperimentDesign& design = {}) {
  std::vector<edgetap::ConditionSummary> out;
  for (double margin : design.margins_mm) {
    for (double size : design.sizes_mm) {
      const edgetap::TargetCondition c{size, margin, edgetap::EdgeSide::kNegative, "x"};
      const auto p = edgetap::predict_sr(c, k);
      out.push_back(summary_for(size, margin, {p.mu_mm, p.sigma_mm, p.gamma1}, p.sr));
    }
  }
  return out;
}

/// Condition summaries whose variance follows the Gaussian baseline exactly.
inline std::vector<edgetap::ConditionSummary> noiseless_gaussian(
    const edgetap::GaussianCoefficients& g, const edgetap::ExperimentDesign& design = {}) {
  std::vector<edgetap::ConditionSummary> out;
  for (double margin : design.margins_mm) {
    for (double size : design.sizes_mm) {
      const edgetap::TargetCondition c{size, margin, edgetap::EdgeSide::kNegative, "x"};
      out.push_back(summary_for(size, margin, {0.0, edgetap::gaussian_sigma(c, g), 0.0},
                                edgetap::gaussian_sr(c, g)));
    }
  }
  return out;
}

}  // namespace fixtures
