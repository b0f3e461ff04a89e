#include "edgetap/preset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edgetap/errors.hpp"
#include "json.hpp"

namespace edgetap {
namespace {

using nlohmann::json;

constexpr std::string_view kNumericFields[] = {"c", "d", "e", "f", "g", "h", "i",
                                               "j", "k", "l", "gaussian_a", "gaussian_b"};

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorCode::kInvalidCoefficients, "preset: " + message);
}

double number_field(const json& doc, std::string_view key) {
  const auto it = doc.find(std::string(key));
  if (it == doc.end()) fail("missing field '" + std::string(key) + "'");
  if (!it->is_number()) fail("field '" + std::string(key) + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) fail("field '" + std::string(key) + "' must be finite");
  return v;
}

std::string string_field(const json& doc, std::string_view key) {
  const auto it = doc.find(std::string(key));
  if (it == doc.end()) fail("missing field '" + std::string(key) + "'");
  if (!it->is_string()) fail("field '" + std::string(key) + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

Preset parse_preset(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document must be an object");

  for (const auto& [key, value] : doc.items()) {
    static const std::string_view kKnown[] = {"name", "device", "edge", "axis", "units",
                                              "spec_version", "comment"};
    bool known = false;
    for (auto k : kKnown) known = known || key == k;
    for (auto k : kNumericFields) known = known || key == k;
    if (!known) fail("unknown field '" + key + "'");
  }

  Preset p;
  p.name = string_field(doc, "name");
  p.device = string_field(doc, "device");
  const std::string edge_text = string_field(doc, "edge");
  const auto edge = parse_edge(edge_text);
  if (!edge) fail("edge must be one of left, right, top, bottom; got '" + edge_text + "'");
  p.edge = *edge;
  p.axis = string_field(doc, "axis");
  if (p.axis != axis_of(p.edge)) {
    fail("axis '" + p.axis + "' does not match edge '" + edge_text + "'");
  }
  p.units = string_field(doc, "units");
  if (p.units != "mm") fail("units must be \"mm\"");
  p.spec_version = string_field(doc, "spec_version");
  if (doc.contains("comment")) p.comment = string_field(doc, "comment");

  auto& k = p.coeffs;
  k.c = number_field(doc, "c");
  k.d = number_field(doc, "d");
  k.e = number_field(doc, "e");
  k.f = number_field(doc, "f");
  k.g = number_field(doc, "g");
  k.h = number_field(doc, "h");
  k.i = number_field(doc, "i");
  k.j = number_field(doc, "j");
  k.k = number_field(doc, "k");
  k.l = number_field(doc, "l");
  p.gaussian.a = number_field(doc, "gaussian_a");
  p.gaussian.b = number_field(doc, "gaussian_b");
  threshold(p.coeffs);  // rejects c <= 0 or d >= 0
  return p;
}

std::string format_preset(const Preset& p) {
  json doc = json::object();
  doc["name"] = p.name;
  doc["device"] = p.device;
  doc["edge"] = std::string(to_string(p.edge));
  doc["axis"] = p.axis;
  doc["c"] = p.coeffs.c;
  doc["d"] = p.coeffs.d;
  doc["e"] = p.coeffs.e;
  doc["f"] = p.coeffs.f;
  doc["g"] = p.coeffs.g;
  doc["h"] = p.coeffs.h;
  doc["i"] = p.coeffs.i;
  doc["j"] = p.coeffs.j;
  doc["k"] = p.coeffs.k;
  doc["l"] = p.coeffs.l;
  doc["gaussian_a"] = p.gaussian.a;
  doc["gaussian_b"] = p.gaussian.b;
  doc["units"] = p.units;
  doc["spec_version"] = p.spec_version;
  if (!p.comment.empty()) doc["comment"] = p.comment;
  return doc.dump(2) + "\n";
}

Preset load_preset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open preset file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_preset(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_preset_file(const Preset& preset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write preset file " + path.string());
  out << format_preset(preset);
}

Preset builtin_left_index_preset() {
  Preset p;
  p.name = "pixel6a-left-index";
  p.device = "Google Pixel 6a";
  p.edge = Edge::kLeft;
  p.axis = "x";
  p.coeffs = {.c = 1.09, .d = -0.170, .e = 0.155, .f = 0.0461, .g = 0.466,
              .h = 1.60, .i = 0.0205, .j = -0.393, .k = 0.108, .l = 3.73};
  p.gaussian = {.a = 1.50, .b = 0.0236};
  p.comment = "Seated, phone held in the non-dominant hand, dominant index finger; "
              "targets against the left screen edge.";
  return p;
}

Preset builtin_bottom_index_preset() {
  Preset p;
  p.name = "pixel6a-bottom-index";
  p.device = "Google Pixel 6a";
  p.edge = Edge::kBottom;
  p.axis = "y";
  // j and k are stored edge-relative (positive mu = away from the edge). In
  // raw screen y (downward) the same quadratic reads j = 0.804, k = -0.0961.
  p.coeffs = {.c = 1.20, .d = -0.199, .e = 0.123, .f = 0.0371, .g = 0.415,
              .h = 1.31, .i = 0.0130, .j = -0.804, .k = 0.0961, .l = 3.60};
  p.gaussian = {.a = 1.23, .b = 0.0164};
  p.comment = "Seated, phone held in the non-dominant hand, dominant index finger; "
              "targets against the bottom screen edge. j, k are edge-relative "
              "(raw screen-y values: j = 0.804, k = -0.0961).";
  return p;
}

PresetRegistry::PresetRegistry() : PresetRegistry(std::nullopt) {}

PresetRegistry::PresetRegistry(std::optional<std::filesystem::path> directory)
    : directory_(std::move(directory)) {
  for (Preset p : {builtin_left_index_preset(), builtin_bottom_index_preset()}) {
    presets_.emplace(p.name, std::move(p));
  }
  if (!directory_) return;
  std::error_code ec;
  if (!std::filesystem::is_directory(*directory_, ec)) return;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(*directory_, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    Preset p = load_preset_file(file);
    presets_.insert_or_assign(p.name, std::move(p));
  }
}

std::vector<std::string> PresetRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(presets_.size());
  for (const auto& [name, _] : presets_) out.push_back(name);
  return out;
}

std::optional<Preset> PresetRegistry::find(std::string_view name) const {
  if (const auto it = presets_.find(name); it != presets_.end()) return it->second;
  if (!directory_ || name.empty() || name.find('/') != std::string_view::npos ||
      name.find("..") != std::string_view::npos) {
    return std::nullopt;
  }
  const auto path = *directory_ / (std::string(name) + ".json");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  return load_preset_file(path);
}

Preset PresetRegistry::get(std::string_view name) const {
  if (auto p = find(name)) return *std::move(p);
  throw Error(ErrorCode::kPresetNotFound, "unknown preset '" + std::string(name) + "'");
}

}  // namespace edgetap
