#include "edgetap/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "edgetap/errors.hpp"
#include "edgetap/skew_normal.hpp"
#include "json.hpp"

namespace edgetap {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json key_json(const ConditionKey& key) {
  return {{"edge", std::string(to_string(key.edge))},
          {"size_mm", key.size_mm},
          {"margin_mm", key.margin_mm}};
}

json report_json(const FitReport& r) {
  json residuals = json::array();
  for (const auto& res : r.per_condition_residuals) {
    json row = key_json(res.key);
    row["d_edge_mm"] = res.d_edge_mm;
    row["observed"] = res.observed;
    row["predicted"] = res.predicted;
    residuals.push_back(std::move(row));
  }
  json doc{{"r2", r.r2},
           {"mae", r.mae},
           {"rmse", r.rmse},
           {"mape", r.mape},
           {"mape_excluded", r.mape_excluded},
           {"residuals", residuals},
           {"warnings", r.warnings}};
  if (r.has_loocv) {
    doc["loocv_r2"] = r.loocv_r2;
    doc["loocv_mae"] = r.loocv_mae;
  }
  return doc;
}

[[noreturn]] void schema(const std::string& what) {
  throw Error(ErrorCode::kSchema, "fit report: " + what);
}

const json& member(const json& obj, const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end()) schema(std::string("missing field '") + name + "'");
  return *it;
}

double real(const json& obj, const char* name) {
  const json& v = member(obj, name);
  if (v.is_null()) return kNaN;
  if (!v.is_number()) schema(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::size_t natural(const json& obj, const char* name) {
  const json& v = member(obj, name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    schema(std::string("field '") + name + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string text(const json& obj, const char* name) {
  const json& v = member(obj, name);
  if (!v.is_string()) schema(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

Edge edge_field(const json& obj) {
  const auto e = parse_edge(text(obj, "edge"));
  if (!e) schema("unknown edge '" + text(obj, "edge") + "'");
  return *e;
}

ConditionKey parse_key(const json& obj) {
  return {edge_field(obj), real(obj, "size_mm"), real(obj, "margin_mm")};
}

std::vector<std::string> strings(const json& obj, const char* name) {
  std::vector<std::string> out;
  for (const auto& v : member(obj, name)) {
    if (!v.is_string()) schema(std::string("field '") + name + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

FitReport parse_report(const json& obj) {
  FitReport r;
  r.r2 = real(obj, "r2");
  r.mae = real(obj, "mae");
  r.rmse = real(obj, "rmse");
  r.mape = real(obj, "mape");
  r.mape_excluded = natural(obj, "mape_excluded");
  if (obj.contains("loocv_r2")) {
    r.has_loocv = true;
    r.loocv_r2 = real(obj, "loocv_r2");
    r.loocv_mae = real(obj, "loocv_mae");
  }
  for (const auto& res : member(obj, "residuals")) {
    r.per_condition_residuals.push_back(
        {parse_key(res), real(res, "d_edge_mm"), real(res, "observed"), real(res, "predicted")});
  }
  r.warnings = strings(obj, "warnings");
  return r;
}

std::string cell(double v, int precision) {
  if (!std::isfinite(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

std::vector<LikelihoodRatioPoint> likelihood_ratios(const FilterResult& filtered) {
  std::vector<LikelihoodRatioPoint> out;
  for (const auto& [key, coords] : pooled_coordinates(filtered)) {
    if (coords.size() < kMinMleSamples) continue;
    out.push_back({key, key.condition().d_edge_mm(), coords.size(),
                   likelihood_ratio_statistic(coords)});
  }
  return out;
}

FitDocument analyze(std::vector<TapSample> samples, std::string name, std::string device) {
  FitDocument doc;
  doc.name = std::move(name);
  doc.device = std::move(device);
  if (samples.empty()) throw Error(ErrorCode::kInsufficientData, "tap log has no rows");
  std::map<Edge, std::size_t> per_edge;
  for (const auto& s : samples) ++per_edge[s.edge];
  doc.edge = per_edge.begin()->first;
  for (const auto& [edge, n] : per_edge) {
    if (n > per_edge[doc.edge]) doc.edge = edge;
  }
  if (per_edge.size() > 1) {
    doc.warnings.push_back("log mixes several edges; coordinates pooled edge-relative, preset labeled " +
                           std::string(to_string(doc.edge)));
  }

  const FilterResult filtered = filter_outliers(std::move(samples));
  doc.removal = filtered.totals;
  doc.conditions = summarize(filtered);
  doc.fit = fit_all(doc.conditions);
  doc.likelihood_ratio = likelihood_ratios(filtered);
  for (const auto& c : doc.conditions) {
    if (c.success_flag_mismatches > 0) {
      doc.warnings.push_back("condition size " + cell(c.condition.size_mm, 3) + " margin " +
                             cell(c.condition.margin_mm, 3) + ": " +
                             std::to_string(c.success_flag_mismatches) +
                             " success flags disagree with tap coordinates");
    }
  }
  return doc;
}

Preset to_preset(const FitDocument& doc) {
  Preset p;
  p.name = doc.name;
  p.device = doc.device;
  p.edge = doc.edge;
  p.axis = std::string(axis_of(doc.edge));
  p.coeffs = doc.fit.skewed;
  p.gaussian = doc.fit.gaussian;
  return p;
}

std::string format_fit_document(const FitDocument& doc) {
  json rows = json::array();
  for (const auto& row : doc.fit.rows) {
    json constants = json::object();
    for (const auto& [k, v] : row.constants) constants[k] = v;
    json r = report_json(row.report);
    r["id"] = std::string(row_id(row.row));
    r["label"] = std::string(row_label(row.row));
    r["constants"] = constants;
    rows.push_back(std::move(r));
  }
  json conditions = json::array();
  for (const auto& c : doc.conditions) {
    json row = key_json(c.key());
    row["d_edge_mm"] = c.condition.d_edge_mm();
    row["n_participants"] = c.n_participants;
    row["n_kept"] = c.n_kept;
    row["n_practice"] = c.n_practice;
    row["n_removed_perpendicular"] = c.n_removed_perpendicular;
    row["n_removed_3sd"] = c.n_removed_3sd;
    row["mu_mm"] = c.moments.mu;
    row["sigma_mm"] = c.moments.sigma;
    row["gamma1"] = c.moments.gamma1;
    row["observed_sr"] = c.observed_sr;
    row["success_flag_mismatches"] = c.success_flag_mismatches;
    conditions.push_back(std::move(row));
  }
  json lr = json::array();
  for (const auto& p : doc.likelihood_ratio) {
    json row = key_json(p.key);
    row["d_edge_mm"] = p.d_edge_mm;
    row["n"] = p.n;
    row["statistic"] = p.statistic;
    lr.push_back(std::move(row));
  }
  const auto& k = doc.fit.skewed;
  json out{
      {"name", doc.name},
      {"device", doc.device},
      {"edge", std::string(to_string(doc.edge))},
      {"removal",
       {{"n_input", doc.removal.n_input},
        {"n_practice", doc.removal.n_practice},
        {"n_removed_perpendicular", doc.removal.n_removed_perpendicular},
        {"n_removed_3sd", doc.removal.n_removed_3sd},
        {"n_kept", doc.removal.n_kept}}},
      {"coefficients",
       {{"c", k.c}, {"d", k.d}, {"e", k.e}, {"f", k.f}, {"g", k.g}, {"h", k.h},
        {"i", k.i}, {"j", k.j}, {"k", k.k}, {"l", k.l},
        {"gaussian_a", doc.fit.gaussian.a}, {"gaussian_b", doc.fit.gaussian.b}}},
      {"rows", rows},
      {"conditions", conditions},
      {"likelihood_ratio", lr},
      {"warnings", doc.warnings}};
  return out.dump(2) + "\n";
}

FitDocument parse_fit_document(std::string_view body) {
  json root;
  try {
    root = json::parse(body);
  } catch (const json::parse_error& e) {
    schema(std::string("not valid JSON (") + e.what() + ")");
  }
  if (!root.is_object()) schema("top level must be an object");

  FitDocument doc;
  doc.name = text(root, "name");
  doc.device = text(root, "device");
  doc.edge = edge_field(root);
  const json& rm = member(root, "removal");
  doc.removal = {natural(rm, "n_input"), natural(rm, "n_practice"),
                 natural(rm, "n_removed_perpendicular"), natural(rm, "n_removed_3sd"),
                 natural(rm, "n_kept")};
  const json& co = member(root, "coefficients");
  doc.fit.skewed = {real(co, "c"), real(co, "d"), real(co, "e"), real(co, "f"), real(co, "g"),
                    real(co, "h"), real(co, "i"), real(co, "j"), real(co, "k"), real(co, "l")};
  doc.fit.gaussian = {real(co, "gaussian_a"), real(co, "gaussian_b")};

  for (const auto& r : member(root, "rows")) {
    const std::string id = text(r, "id");
    const ModelRow* found = nullptr;
    for (const auto& row : kAllRows) {
      if (row_id(row) == id) found = &row;
    }
    if (!found) schema("unknown row id '" + id + "'");
    RowReport row{*found, {}, parse_report(r)};
    for (const auto& [name, v] : member(r, "constants").items()) {
      if (!v.is_number()) schema("constant '" + name + "' must be a number");
      row.constants.emplace_back(name, v.get<double>());
    }
    doc.fit.rows.push_back(std::move(row));
  }
  for (const auto& c : member(root, "conditions")) {
    ConditionSummary s;
    const ConditionKey key = parse_key(c);
    s.edge = key.edge;
    s.condition = key.condition();
    s.n_participants = natural(c, "n_participants");
    s.n_kept = natural(c, "n_kept");
    s.n_practice = natural(c, "n_practice");
    s.n_removed_perpendicular = natural(c, "n_removed_perpendicular");
    s.n_removed_3sd = natural(c, "n_removed_3sd");
    s.moments = {real(c, "mu_mm"), real(c, "sigma_mm"), real(c, "gamma1")};
    s.observed_sr = real(c, "observed_sr");
    s.success_flag_mismatches = natural(c, "success_flag_mismatches");
    doc.conditions.push_back(std::move(s));
  }
  for (const auto& p : member(root, "likelihood_ratio")) {
    doc.likelihood_ratio.push_back(
        {parse_key(p), real(p, "d_edge_mm"), natural(p, "n"), real(p, "statistic")});
  }
  doc.warnings = strings(root, "warnings");
  return doc;
}

std::string render_fit_table(const FitDocument& doc) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-44s %7s %8s %8s %9s %9s %9s\n", "Model", "Constants",
                "R2", "MAE", "RMSE", "MAPE", "LOOCV R2", "LOOCV MAE");
  out << line;
  for (const auto& row : doc.fit.rows) {
    std::string constants;
    for (const auto& [name, v] : row.constants) {
      if (!constants.empty()) constants += ' ';
      char buf[48];
      std::snprintf(buf, sizeof buf, "%s=%.4g", name.c_str(), v);
      constants += buf;
    }
    if (constants.empty()) constants = "-";
    const FitReport& r = row.report;
    const std::string mape = std::isfinite(r.mape) ? cell(r.mape, 2) + "%" : "n/a";
    std::snprintf(line, sizeof line, "%-16s %-44s %7s %8s %8s %9s %9s %9s\n",
                  std::string(row_label(row.row)).c_str(), constants.c_str(),
                  cell(r.r2, 3).c_str(), cell(r.mae, 3).c_str(), cell(r.rmse, 3).c_str(),
                  mape.c_str(), r.has_loocv ? cell(r.loocv_r2, 3).c_str() : "-",
                  r.has_loocv ? cell(r.loocv_mae, 3).c_str() : "-");
    out << line;
  }
  out << "threshold -c/d = " << cell(threshold(doc.fit.skewed), 3) << " mm; taps kept "
      << doc.removal.n_kept << " of " << doc.removal.n_input << " (practice "
      << doc.removal.n_practice << ", perpendicular " << doc.removal.n_removed_perpendicular
      << ", 3SD " << doc.removal.n_removed_3sd << ")\n";
  for (const auto& w : doc.warnings) out << "warning: " << w << '\n';
  for (const auto& row : doc.fit.rows) {
    for (const auto& w : row.report.warnings) out << "warning (" << row_id(row.row) << "): " << w << '\n';
  }
  return out.str();
}

}  // namespace edgetap
