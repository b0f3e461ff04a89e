#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "edgetap/edge_model.hpp"
#include "edgetap/skew_normal.hpp"

namespace edgetap {

/// Pixel density and display size. Defaults describe a Pixel 6a in portrait:
/// 1080 px across 64.1 mm.
struct DeviceGeometry {
  double px_per_mm = 16.849;
  double display_w_mm = 64.1;
  double display_h_mm = 142.5;
};

void validate(const DeviceGeometry& geometry);

/// One row of a tap log with lengths already in millimetres. tap_mm is the
/// tap offset from the target center along the constrained axis in screen
/// orientation (x to the right, y downward).
struct TapLogRow {
  std::string participant;
  int set = 0;
  int trial = 0;
  Edge edge = Edge::kLeft;
  double margin_mm = 0.0;
  double size_mm = 1.0;
  double tap_mm = 0.0;
  bool perp_miss = false;
  bool success = false;
};

/// Identifies a task condition (edge, size, margin).
struct ConditionKey {
  Edge edge = Edge::kLeft;
  double size_mm = 0.0;
  double margin_mm = 0.0;

  friend auto operator<=>(const ConditionKey&, const ConditionKey&) = default;
  TargetCondition condition() const;
};

struct TapSample {
  std::string participant_id;
  int set_index = 0;
  int trial = 0;
  Edge edge = Edge::kLeft;
  TargetCondition condition;
  /// Edge-relative coordinate: offset from the target center, positive away
  /// from the edge on every axis.
  double coord_mm = 0.0;
  bool perpendicular_miss = false;
  bool success = false;

  ConditionKey key() const { return {edge, condition.size_mm, condition.margin_mm}; }
};

/// Reads the tap-log CSV. Header required; columns
///   participant,set,trial,edge,axis,margin_px,size_px,tap_px,perp_miss,success
/// where any of the *_px columns may be replaced (or accompanied) by *_mm.
/// When both are present they must agree within 0.01 mm. Returned samples are
/// ordered by condition, then participant, then file order.
/// Throws Error(kSchema) naming the line, Error(kUnitMismatch) on px/mm
/// disagreement.
std::vector<TapSample> load_tap_log(std::istream& in, const DeviceGeometry& geometry);
std::vector<TapSample> load_tap_log(const std::filesystem::path& path,
                                    const DeviceGeometry& geometry);

/// Writes rows with the mm column variant; numbers use the shortest
/// round-trip representation so output is byte-reproducible.
void write_tap_log(std::ostream& out, std::span<const TapLogRow> rows);

struct RemovalCounts {
  std::size_t n_input = 0;
  std::size_t n_practice = 0;
  std::size_t n_removed_perpendicular = 0;
  std::size_t n_removed_3sd = 0;
  std::size_t n_kept = 0;

  RemovalCounts& operator+=(const RemovalCounts& other);
};

struct FilterResult {
  std::vector<TapSample> kept;
  RemovalCounts totals;
  std::map<ConditionKey, RemovalCounts> per_condition;
};

/// Drops practice sets (set 0), then perpendicular misses, then, per
/// participant x condition, taps more than 3 SD from the group mean (one pass).
FilterResult filter_outliers(std::vector<TapSample> samples);

struct ConditionSummary {
  TargetCondition condition;
  Edge edge = Edge::kLeft;
  std::size_t n_participants = 0;
  std::size_t n_kept = 0;
  std::size_t n_practice = 0;
  std::size_t n_removed_perpendicular = 0;
  std::size_t n_removed_3sd = 0;
  /// Per-participant moments averaged with equal weight (edge-relative frame).
  TapMoments moments;
  double observed_sr = 0.0;
  /// Kept taps whose success flag disagrees with |coord| <= S/2.
  std::size_t success_flag_mismatches = 0;

  ConditionKey key() const { return {edge, condition.size_mm, condition.margin_mm}; }
};

inline constexpr std::size_t kMinTapsPerGroup = 3;

/// Throws Error(kInsufficientData) when any participant x condition group has
/// fewer than kMinTapsPerGroup kept taps.
std::vector<ConditionSummary> summarize(const FilterResult& filtered);

/// Kept coordinates pooled over participants, per condition.
std::map<ConditionKey, std::vector<double>> pooled_coordinates(const FilterResult& filtered);

}  // namespace edgetap
