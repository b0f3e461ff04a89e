#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "edgetap/edge_model.hpp"
#include "edgetap/experiment_data.hpp"
#include "edgetap/skew_normal.hpp"

namespace edgetap {

/// Factorial tap experiment: every (margin, size) pair once per set, in a
/// fresh random order each set.
struct ExperimentDesign {
  std::vector<double> margins_mm = {0.0, 1.560, 3.119, 4.679, 7.798,
                                    9.358, 12.477, 15.596, 18.715};
  std::vector<double> sizes_mm = {1.560, 2.339, 3.119, 4.679, 7.798};
  std::size_t participants = 15;
  /// Includes the practice set (set 0).
  std::size_t sets = 25;
  Edge edge = Edge::kLeft;
  std::uint64_t seed = 1;

  /// Per-participant additive mean offset (mm, edge-relative); 0 disables.
  double participant_mu_sd = 0.0;
  /// Probability that a trial misses perpendicular to the constrained axis.
  double perpendicular_miss_rate = 0.0;
  /// Probability that a tap is replaced by a gross outlier placed
  /// contamination_sd_multiple condition SDs from the condition mean.
  double contamination_rate = 0.0;
  double contamination_sd_multiple = 12.0;
};

/// Throws Error(kInvalidArgument) on empty grids, negative margins,
/// non-positive sizes, zero participants/sets or rates outside [0, 1].
void validate(const ExperimentDesign& design);

/// Throws Error(kInadmissibleTruth) unless c > 0, d < 0 and the predicted
/// variance is positive for every condition of the design.
void check_admissible(const ExperimentDesign& design, const EdgeModelCoefficients& truth);

/// One tap per trial drawn from each condition's implied skew-normal shape.
/// Rows are ordered participant, set, trial; deterministic for a given seed.
std::vector<TapLogRow> generate_experiment(const ExperimentDesign& design,
                                           const EdgeModelCoefficients& truth);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

inline constexpr std::size_t kMinMonteCarloSamples = 10'000;

/// Fraction of n draws inside [-S/2, S/2] with SE sqrt(p (1 - p) / n).
/// Throws Error(kPrecondition) when n < kMinMonteCarloSamples.
MonteCarloEstimate monte_carlo_sr(const SkewNormalShape& shape, double size_mm, std::size_t n,
                                  std::uint64_t seed);

}  // namespace edgetap
