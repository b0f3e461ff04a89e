#include "edgetap/api.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "edgetap/skew_normal.hpp"
#include "json.hpp"

namespace edgetap::api {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& message) {
  throw RequestError(400, field, field + ": " + message);
}

json parse_body(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    bad("body", "request body is not valid JSON");
  }
  if (!doc.is_object()) bad("body", "request body must be a JSON object");
  return doc;
}

double number(const json& doc, const std::string& field, bool required = true,
              double fallback = 0.0) {
  const auto it = doc.find(field);
  if (it == doc.end()) {
    if (required) bad(field, "is required");
    return fallback;
  }
  if (!it->is_number()) bad(field, "must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) bad(field, "must be finite");
  return v;
}

std::size_t count(const json& doc, const std::string& field, std::size_t lo, std::size_t hi) {
  const auto it = doc.find(field);
  if (!it->is_number_integer() && !it->is_number_unsigned()) bad(field, "must be an integer");
  const auto v = it->get<long long>();
  if (v < static_cast<long long>(lo) || v > static_cast<long long>(hi)) {
    bad(field, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<std::size_t>(v);
}

SkewNormalShape parse_shape(const json& doc) {
  const auto it = doc.find("shape");
  if (it == doc.end() || !it->is_object()) bad("shape", "must be an object {xi, omega, alpha}");
  SkewNormalShape s;
  s.xi = number(*it, "xi");
  s.omega = number(*it, "omega");
  s.alpha = number(*it, "alpha");
  if (!(s.omega > 0.0)) bad("shape.omega", "must be positive");
  return s;
}

json curve_json(const std::vector<CurvePoint>& curve) {
  json out = json::array();
  for (const auto& p : curve) out.push_back(json::array({p.x_mm, p.density}));
  return out;
}

json error_json(const RequestError& e) {
  return json{{"error", e.what()}, {"field", e.field()}};
}

}  // namespace

PredictRequest parse_predict_request(std::string_view body) {
  const json doc = parse_body(body);
  PredictRequest req;
  req.size_mm = number(doc, "size_mm");
  if (!(req.size_mm > 0.0)) bad("size_mm", "must be positive");
  req.margin_mm = number(doc, "margin_mm");
  if (!(req.margin_mm >= 0.0)) bad("margin_mm", "must be non-negative");

  const auto edge_it = doc.find("edge");
  if (edge_it == doc.end()) bad("edge", "is required");
  if (!edge_it->is_string()) bad("edge", "must be one of left, right, top, bottom");
  const auto edge = parse_edge(edge_it->get<std::string>());
  if (!edge) bad("edge", "must be one of left, right, top, bottom");
  req.edge = *edge;

  const auto preset_it = doc.find("preset");
  if (preset_it == doc.end()) bad("preset", "is required (a name or inline coefficients)");
  if (preset_it->is_string()) {
    req.preset = preset_it->get<std::string>();
    if (req.preset.empty()) bad("preset", "must not be empty");
  } else if (preset_it->is_object()) {
    EdgeModelCoefficients k;
    GaussianCoefficients g;
    const json& p = *preset_it;
    const auto field = [&p](const char* name) {
      const auto it = p.find(name);
      if (it == p.end()) bad(std::string("preset.") + name, "is required");
      if (!it->is_number() || !std::isfinite(it->get<double>())) {
        bad(std::string("preset.") + name, "must be a finite number");
      }
      return it->get<double>();
    };
    k = {field("c"), field("d"), field("e"), field("f"), field("g"),
         field("h"), field("i"), field("j"), field("k"), field("l")};
    g = {field("gaussian_a"), field("gaussian_b")};
    if (!(k.c > 0.0)) bad("preset.c", "must be positive");
    if (!(k.d < 0.0)) bad("preset.d", "must be negative");
    req.inline_coeffs = std::make_pair(k, g);
  } else {
    bad("preset", "must be a preset name or an object of coefficients");
  }

  if (doc.contains("curve_points") && !doc.at("curve_points").is_null()) {
    req.curve_points = count(doc, "curve_points", 2, kMaxCurvePoints);
  }
  return req;
}

std::string format_predict_request(const PredictRequest& r) {
  json doc{{"size_mm", r.size_mm}, {"margin_mm", r.margin_mm},
           {"edge", std::string(to_string(r.edge))}};
  if (r.inline_coeffs) {
    const auto& [k, g] = *r.inline_coeffs;
    doc["preset"] = json{{"c", k.c}, {"d", k.d}, {"e", k.e}, {"f", k.f},
                         {"g", k.g}, {"h", k.h}, {"i", k.i}, {"j", k.j},
                         {"k", k.k}, {"l", k.l}, {"gaussian_a", g.a}, {"gaussian_b", g.b}};
  } else {
    doc["preset"] = r.preset;
  }
  if (r.curve_points) doc["curve_points"] = *r.curve_points;
  return doc.dump();
}

std::pair<double, double> curve_range(const SkewNormalShape& shape, double size_mm) {
  const double lo = std::min(shape.xi - 8.0 * shape.omega, -0.5 * size_mm);
  const double hi = std::max(shape.xi + 8.0 * shape.omega, 0.5 * size_mm);
  return {lo, hi};
}

std::vector<CurvePoint> density_curve(const SkewNormalShape& shape, double x_min, double x_max,
                                      std::size_t points) {
  std::vector<CurvePoint> out;
  out.reserve(points);
  const double step = points > 1 ? (x_max - x_min) / static_cast<double>(points - 1) : 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = i + 1 == points ? x_max : x_min + step * static_cast<double>(i);
    out.push_back({x, pdf(x, shape)});
  }
  return out;
}

PredictResponse predict(const PredictRequest& req, const PresetRegistry& presets) {
  EdgeModelCoefficients coeffs;
  GaussianCoefficients gauss;
  PredictResponse out;
  if (req.inline_coeffs) {
    std::tie(coeffs, gauss) = *req.inline_coeffs;
  } else {
    std::optional<Preset> preset;
    try {
      preset = presets.find(req.preset);
    } catch (const Error& e) {
      throw RequestError(400, "preset", std::string("preset: ") + e.what());
    }
    if (!preset) throw RequestError(404, "preset", "preset: unknown preset '" + req.preset + "'");
    coeffs = preset->coeffs;
    gauss = preset->gaussian;
    out.preset = preset->name;
  }

  const TargetCondition cond{req.size_mm, req.margin_mm, side_of(req.edge),
                             std::string(axis_of(req.edge))};
  out.edge = req.edge;
  out.size_mm = req.size_mm;
  out.margin_mm = req.margin_mm;
  out.d_edge_mm = cond.d_edge_mm();
  try {
    const SrPrediction p = predict_sr(cond, coeffs);
    out.sr = p.sr;
    out.gamma1 = p.gamma1;
    out.sigma_mm = p.sigma_mm;
    out.mu_mm = p.mu_mm;
    out.shape = p.shape;
    out.regime = p.regime;
    out.threshold_mm = threshold(coeffs);
    out.gaussian_sr = gaussian_sr(cond, gauss);
  } catch (const RequestError&) {
    throw;
  } catch (const Error& e) {
    throw RequestError(400, "preset", std::string("preset: ") + e.what());
  }
  if (req.curve_points) {
    const auto [lo, hi] = curve_range(out.shape, req.size_mm);
    out.curve = density_curve(out.shape, lo, hi, *req.curve_points);
  }
  return out;
}

std::string to_json(const PredictResponse& r) {
  json doc{{"sr", r.sr},
           {"gamma1", r.gamma1},
           {"sigma_mm", r.sigma_mm},
           {"mu_mm", r.mu_mm},
           {"shape", {{"xi", r.shape.xi}, {"omega", r.shape.omega}, {"alpha", r.shape.alpha}}},
           {"regime", std::string(to_string(r.regime))},
           {"threshold_mm", r.threshold_mm},
           {"gaussian_sr", r.gaussian_sr},
           {"d_edge_mm", r.d_edge_mm},
           {"size_mm", r.size_mm},
           {"margin_mm", r.margin_mm},
           {"edge", std::string(to_string(r.edge))}};
  if (!r.preset.empty()) doc["preset"] = r.preset;
  if (!r.curve.empty()) doc["curve"] = curve_json(r.curve);
  return doc.dump();
}

std::string to_text(const PredictResponse& r) {
  std::ostringstream out;
  out << std::setprecision(6);
  if (!r.preset.empty()) out << "preset        " << r.preset << '\n';
  out << "edge          " << to_string(r.edge) << '\n'
      << "size_mm       " << r.size_mm << '\n'
      << "margin_mm     " << r.margin_mm << '\n'
      << "d_edge_mm     " << r.d_edge_mm << '\n'
      << "regime        " << to_string(r.regime) << '\n'
      << "threshold_mm  " << r.threshold_mm << '\n'
      << "gamma1        " << r.gamma1 << '\n'
      << "sigma_mm      " << r.sigma_mm << '\n'
      << "mu_mm         " << r.mu_mm << '\n'
      << "shape         xi=" << r.shape.xi << " omega=" << r.shape.omega
      << " alpha=" << r.shape.alpha << '\n'
      << std::fixed << std::setprecision(2)
      << "sr            " << 100.0 * r.sr << " %\n"
      << "gaussian_sr   " << 100.0 * r.gaussian_sr << " %\n";
  if (!r.curve.empty()) {
    out << std::defaultfloat << std::setprecision(6) << "curve (x_mm, density)\n";
    for (const auto& p : r.curve) out << "  " << p.x_mm << ' ' << p.density << '\n';
  }
  return out.str();
}

Reply handle_predict(std::string_view body, const PresetRegistry& presets) {
  try {
    return {200, "application/json", to_json(predict(parse_predict_request(body), presets))};
  } catch (const RequestError& e) {
    return {e.status(), "application/json", error_json(e).dump()};
  }
}

Reply handle_presets(const PresetRegistry& presets) {
  json list = json::array();
  for (const auto& name : presets.names()) {
    const Preset p = presets.get(name);
    list.push_back({{"name", p.name},
                    {"device", p.device},
                    {"edge", std::string(to_string(p.edge))},
                    {"axis", p.axis},
                    {"threshold_mm", threshold(p.coeffs)}});
  }
  return {200, "application/json", json{{"presets", list}}.dump()};
}

Reply handle_curve(std::string_view body) {
  try {
    const json doc = parse_body(body);
    const SkewNormalShape shape = parse_shape(doc);
    const double x_min = number(doc, "x_min");
    const double x_max = number(doc, "x_max");
    if (!(x_min < x_max)) bad("x_max", "must exceed x_min");
    std::size_t points = 201;
    if (doc.contains("points")) points = count(doc, "points", 2, kMaxCurvePoints);
    return {200, "application/json",
            json{{"curve", curve_json(density_curve(shape, x_min, x_max, points))}}.dump()};
  } catch (const RequestError& e) {
    return {e.status(), "application/json", error_json(e).dump()};
  }
}

Reply handle_health() { return {200, "text/plain", "ok"}; }

}  // namespace edgetap::api
