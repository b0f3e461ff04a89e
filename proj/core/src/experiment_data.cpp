#include "edgetap/experiment_data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include "edgetap/errors.hpp"
#include "edgetap/statistics.hpp"

namespace edgetap {
namespace {

constexpr double kUnitTolerance = 0.01;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

[[noreturn]] void schema_error(std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << "tap log line " << line << ": " << what;
  throw Error(ErrorCode::kSchema, msg.str());
}

double parse_double(std::string_view text, std::size_t line, std::string_view column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    schema_error(line, "column '" + std::string(column) + "' is not a number: '" +
                           std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text, std::size_t line, std::string_view column) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 0) {
    schema_error(line, "column '" + std::string(column) +
                           "' is not a non-negative integer: '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, std::size_t line, std::string_view column) {
  if (text == "1" || text == "true" || text == "TRUE" || text == "True") return true;
  if (text == "0" || text == "false" || text == "FALSE" || text == "False") return false;
  schema_error(line, "column '" + std::string(column) + "' is not a boolean: '" +
                         std::string(text) + "'");
}

// Column positions resolved from the header.
struct Layout {
  std::size_t participant, set, trial, edge, axis, perp_miss, success;
  // index 0: margin, 1: size, 2: tap
  std::array<std::optional<std::size_t>, 3> px;
  std::array<std::optional<std::size_t>, 3> mm;
  std::size_t width = 0;
};

constexpr std::array<std::string_view, 3> kLengthNames = {"margin", "size", "tap"};

Layout read_header(std::string_view header) {
  const auto cols = split_csv(header);
  Layout layout;
  layout.width = cols.size();
  const auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto require = [&](std::string_view name) {
    const auto idx = find(name);
    if (!idx) schema_error(1, "header is missing column '" + std::string(name) + "'");
    return *idx;
  };
  layout.participant = require("participant");
  layout.set = require("set");
  layout.trial = require("trial");
  layout.edge = require("edge");
  layout.axis = require("axis");
  layout.perp_miss = require("perp_miss");
  layout.success = require("success");
  for (std::size_t i = 0; i < kLengthNames.size(); ++i) {
    const std::string base(kLengthNames[i]);
    layout.px[i] = find(base + "_px");
    layout.mm[i] = find(base + "_mm");
    if (!layout.px[i] && !layout.mm[i]) {
      schema_error(1, "header needs '" + base + "_px' or '" + base + "_mm'");
    }
  }
  return layout;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

void validate(const DeviceGeometry& g) {
  if (!std::isfinite(g.px_per_mm) || !(g.px_per_mm > 0.0) || !(g.display_w_mm > 0.0) ||
      !(g.display_h_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "device geometry needs positive px_per_mm and display dimensions");
  }
}

TargetCondition ConditionKey::condition() const {
  return {size_mm, margin_mm, side_of(edge), std::string(axis_of(edge))};
}

std::vector<TapSample> load_tap_log(std::istream& in, const DeviceGeometry& geometry) {
  validate(geometry);
  std::string line;
  std::size_t line_no = 0;
  std::optional<Layout> layout;
  std::vector<TapSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!layout) {
      std::string_view header = line;
      if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);  // UTF-8 BOM
      layout = read_header(header);
      continue;
    }
    const auto cols = split_csv(line);
    if (cols.size() != layout->width) {
      std::ostringstream msg;
      msg << "expected " << layout->width << " fields, found " << cols.size();
      schema_error(line_no, msg.str());
    }

    TapSample s;
    s.participant_id = std::string(cols[layout->participant]);
    if (s.participant_id.empty()) schema_error(line_no, "empty participant");
    s.set_index = parse_int(cols[layout->set], line_no, "set");
    s.trial = parse_int(cols[layout->trial], line_no, "trial");
    const auto edge = parse_edge(cols[layout->edge]);
    if (!edge) {
      schema_error(line_no, "edge must be left, right, top or bottom; got '" +
                                std::string(cols[layout->edge]) + "'");
    }
    s.edge = *edge;
    if (cols[layout->axis] != axis_of(s.edge)) {
      schema_error(line_no, "axis '" + std::string(cols[layout->axis]) +
                                "' does not match edge '" + std::string(to_string(s.edge)) + "'");
    }
    s.perpendicular_miss = parse_bool(cols[layout->perp_miss], line_no, "perp_miss");
    s.success = parse_bool(cols[layout->success], line_no, "success");

    std::array<double, 3> lengths{};
    for (std::size_t i = 0; i < kLengthNames.size(); ++i) {
      const std::string base(kLengthNames[i]);
      std::optional<double> from_px;
      std::optional<double> from_mm;
      if (layout->px[i]) {
        from_px = parse_double(cols[*layout->px[i]], line_no, base + "_px") / geometry.px_per_mm;
      }
      if (layout->mm[i]) from_mm = parse_double(cols[*layout->mm[i]], line_no, base + "_mm");
      if (from_px && from_mm && std::abs(*from_px - *from_mm) > kUnitTolerance) {
        std::ostringstream msg;
        msg << "tap log line " << line_no << ": " << base << "_px converts to " << *from_px
            << " mm but " << base << "_mm is " << *from_mm;
        throw Error(ErrorCode::kUnitMismatch, msg.str());
      }
      lengths[i] = from_mm ? *from_mm : *from_px;
    }
    if (!(lengths[1] > 0.0)) schema_error(line_no, "size must be positive");
    if (lengths[0] < 0.0) schema_error(line_no, "margin must be non-negative");

    s.condition = ConditionKey{s.edge, lengths[1], lengths[0]}.condition();
    s.coord_mm = side_sign(side_of(s.edge)) * lengths[2];
    samples.push_back(std::move(s));
  }
  std::stable_sort(samples.begin(), samples.end(), [](const TapSample& a, const TapSample& b) {
    if (a.key() != b.key()) return a.key() < b.key();
    return a.participant_id < b.participant_id;
  });
  return samples;
}

std::vector<TapSample> load_tap_log(const std::filesystem::path& path,
                                    const DeviceGeometry& geometry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open tap log " + path.string());
  return load_tap_log(in, geometry);
}

void write_tap_log(std::ostream& out, std::span<const TapLogRow> rows) {
  out << "participant,set,trial,edge,axis,margin_mm,size_mm,tap_mm,perp_miss,success\n";
  for (const TapLogRow& r : rows) {
    out << r.participant << ',' << r.set << ',' << r.trial << ',' << to_string(r.edge) << ','
        << axis_of(r.edge) << ',' << format_number(r.margin_mm) << ','
        << format_number(r.size_mm) << ',' << format_number(r.tap_mm) << ','
        << (r.perp_miss ? 1 : 0) << ',' << (r.success ? 1 : 0) << '\n';
  }
}

RemovalCounts& RemovalCounts::operator+=(const RemovalCounts& o) {
  n_input += o.n_input;
  n_practice += o.n_practice;
  n_removed_perpendicular += o.n_removed_perpendicular;
  n_removed_3sd += o.n_removed_3sd;
  n_kept += o.n_kept;
  return *this;
}

FilterResult filter_outliers(std::vector<TapSample> samples) {
  FilterResult result;
  // Group by (condition, participant) keeping input order inside each group.
  std::stable_sort(samples.begin(), samples.end(), [](const TapSample& a, const TapSample& b) {
    if (a.key() != b.key()) return a.key() < b.key();
    return a.participant_id < b.participant_id;
  });

  std::size_t begin = 0;
  while (begin < samples.size()) {
    std::size_t end = begin;
    while (end < samples.size() && samples[end].key() == samples[begin].key() &&
           samples[end].participant_id == samples[begin].participant_id) {
      ++end;
    }
    RemovalCounts counts;
    counts.n_input = end - begin;
    std::vector<const TapSample*> candidates;
    for (std::size_t i = begin; i < end; ++i) {
      const TapSample& s = samples[i];
      if (s.set_index == 0) {
        ++counts.n_practice;
      } else if (s.perpendicular_miss) {
        ++counts.n_removed_perpendicular;
      } else {
        candidates.push_back(&s);
      }
    }

    std::vector<double> coords;
    coords.reserve(candidates.size());
    for (const TapSample* s : candidates) coords.push_back(s->coord_mm);
    const SampleSummary stats = describe(coords);
    for (const TapSample* s : candidates) {
      if (stats.n >= 2 && stats.sd > 0.0 && std::abs(s->coord_mm - stats.mean) > 3.0 * stats.sd) {
        ++counts.n_removed_3sd;
      } else {
        result.kept.push_back(*s);
        ++counts.n_kept;
      }
    }
    result.per_condition[samples[begin].key()] += counts;
    result.totals += counts;
    begin = end;
  }
  return result;
}

std::vector<ConditionSummary> summarize(const FilterResult& filtered) {
  std::vector<ConditionSummary> out;
  const auto& kept = filtered.kept;
  std::size_t begin = 0;
  while (begin < kept.size()) {
    const ConditionKey key = kept[begin].key();
    ConditionSummary summary;
    summary.condition = key.condition();
    summary.edge = key.edge;

    double mu_sum = 0.0, sigma_sum = 0.0, gamma_sum = 0.0;
    std::size_t successes = 0;
    std::size_t end = begin;
    while (end < kept.size() && kept[end].key() == key) {
      std::size_t group_end = end;
      std::vector<double> coords;
      while (group_end < kept.size() && kept[group_end].key() == key &&
             kept[group_end].participant_id == kept[end].participant_id) {
        const TapSample& s = kept[group_end];
        coords.push_back(s.coord_mm);
        successes += s.success ? 1 : 0;
        const bool inside = std::abs(s.coord_mm) <= 0.5 * s.condition.size_mm;
        summary.success_flag_mismatches += inside != s.success ? 1 : 0;
        ++group_end;
      }
      if (coords.size() < kMinTapsPerGroup) {
        std::ostringstream msg;
        msg << "participant '" << kept[end].participant_id << "' has " << coords.size()
            << " kept taps for condition edge=" << to_string(key.edge)
            << " size_mm=" << key.size_mm << " margin_mm=" << key.margin_mm << "; need at least "
            << kMinTapsPerGroup;
        throw Error(ErrorCode::kInsufficientData, msg.str());
      }
      const SampleSummary stats = describe(coords);
      mu_sum += stats.mean;
      sigma_sum += stats.sd;
      gamma_sum += stats.skewness;
      ++summary.n_participants;
      summary.n_kept += coords.size();
      end = group_end;
    }

    const double np = static_cast<double>(summary.n_participants);
    summary.moments = {mu_sum / np, sigma_sum / np, gamma_sum / np};
    summary.observed_sr = static_cast<double>(successes) / static_cast<double>(summary.n_kept);
    if (const auto it = filtered.per_condition.find(key); it != filtered.per_condition.end()) {
      summary.n_practice = it->second.n_practice;
      summary.n_removed_perpendicular = it->second.n_removed_perpendicular;
      summary.n_removed_3sd = it->second.n_removed_3sd;
    }
    out.push_back(std::move(summary));
    begin = end;
  }
  return out;
}

std::map<ConditionKey, std::vector<double>> pooled_coordinates(const FilterResult& filtered) {
  std::map<ConditionKey, std::vector<double>> out;
  for (const TapSample& s : filtered.kept) out[s.key()].push_back(s.coord_mm);
  return out;
}

}  // namespace edgetap
