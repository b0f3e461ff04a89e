#include "edgetap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "edgetap/errors.hpp"
#include "edgetap/random.hpp"

namespace edgetap {
namespace {

struct ConditionPlan {
  double margin_mm;
  double size_mm;
  TapMoments moments;  // edge-relative
};

std::vector<ConditionPlan> plan_conditions(const ExperimentDesign& design,
                                           const EdgeModelCoefficients& truth) {
  std::vector<ConditionPlan> plans;
  for (double margin : design.margins_mm) {
    for (double size : design.sizes_mm) {
      // Generate in the edge-relative frame, then map to screen axes on output.
      const TargetCondition cond{size, margin, EdgeSide::kNegative, ""};
      ConditionPlan plan{margin, size, {}};
      try {
        plan.moments = {predict_mu(cond, truth), predict_sigma(cond, truth),
                        predict_gamma1(cond, truth)};
      } catch (const Error& e) {
        std::ostringstream msg;
        msg << "truth coefficients are inadmissible at size_mm=" << size
            << ", margin_mm=" << margin << ": " << e.what();
        throw Error(ErrorCode::kInadmissibleTruth, msg.str());
      }
      plans.push_back(plan);
    }
  }
  return plans;
}

}  // namespace

void validate(const ExperimentDesign& d) {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "experiment design: " + what);
  };
  if (d.margins_mm.empty() || d.sizes_mm.empty()) fail("margins and sizes must be non-empty");
  for (double m : d.margins_mm) {
    if (!std::isfinite(m) || m < 0.0) fail("margins must be non-negative");
  }
  for (double s : d.sizes_mm) {
    if (!std::isfinite(s) || !(s > 0.0)) fail("sizes must be positive");
  }
  if (d.participants == 0 || d.sets == 0) fail("participants and sets must be at least 1");
  for (double rate : {d.perpendicular_miss_rate, d.contamination_rate}) {
    if (!(rate >= 0.0 && rate <= 1.0)) fail("rates must lie in [0, 1]");
  }
  if (!(d.participant_mu_sd >= 0.0)) fail("participant_mu_sd must be non-negative");
  if (!(d.contamination_sd_multiple > 0.0)) fail("contamination_sd_multiple must be positive");
}

void check_admissible(const ExperimentDesign& design, const EdgeModelCoefficients& truth) {
  try {
    threshold(truth);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInadmissibleTruth, e.what());
  }
  plan_conditions(design, truth);
}

std::vector<TapLogRow> generate_experiment(const ExperimentDesign& design,
                                           const EdgeModelCoefficients& truth) {
  validate(design);
  check_admissible(design, truth);
  const std::vector<ConditionPlan> plans = plan_conditions(design, truth);
  const double screen_sign = side_sign(side_of(design.edge));

  std::vector<TapLogRow> rows;
  rows.reserve(design.participants * design.sets * plans.size());
  for (std::size_t p = 0; p < design.participants; ++p) {
    const std::string participant = "P" + std::to_string(p + 1);
    Rng participant_rng(mix_seed(design.seed, p));
    const double mu_offset = design.participant_mu_sd * participant_rng.standard_normal();

    for (std::size_t set = 0; set < design.sets; ++set) {
      // Independent stream per (participant, set) so the draws do not depend
      // on how many trials came before.
      Rng rng(mix_seed(mix_seed(design.seed, p), set + 1));
      std::vector<std::size_t> order(plans.size());
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
      }
      for (std::size_t t = 0; t < order.size(); ++t) {
        const ConditionPlan& plan = plans[order[t]];
        TapMoments m = plan.moments;
        m.mu += mu_offset;
        const SkewNormalShape shape = moments_to_shape(m);

        double coord = draw(shape, rng);
        if (rng.uniform() < design.contamination_rate) {
          const double direction = rng.uniform() < 0.5 ? -1.0 : 1.0;
          coord = m.mu + direction * design.contamination_sd_multiple * m.sigma;
        }
        const bool perp_miss = rng.uniform() < design.perpendicular_miss_rate;

        TapLogRow row;
        row.participant = participant;
        row.set = static_cast<int>(set);
        row.trial = static_cast<int>(t);
        row.edge = design.edge;
        row.margin_mm = plan.margin_mm;
        row.size_mm = plan.size_mm;
        row.tap_mm = screen_sign * coord;
        row.perp_miss = perp_miss;
        row.success = !perp_miss && std::abs(coord) <= 0.5 * plan.size_mm;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

MonteCarloEstimate monte_carlo_sr(const SkewNormalShape& shape, double size_mm, std::size_t n,
                                  std::uint64_t seed) {
  if (n < kMinMonteCarloSamples) {
    std::ostringstream msg;
    msg << "Monte Carlo SR needs at least " << kMinMonteCarloSamples << " samples, got " << n;
    throw Error(ErrorCode::kPrecondition, msg.str());
  }
  validate(shape);
  Rng rng(seed);
  const double half = 0.5 * size_mm;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = draw(shape, rng);
    hits += (x >= -half && x <= half) ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace edgetap
