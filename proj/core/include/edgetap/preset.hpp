#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgetap/edge_model.hpp"

namespace edgetap {

inline constexpr std::string_view kPresetSpecVersion = "1.0";

/// A named, versioned set of fitted constants for one device, edge and axis.
struct Preset {
  std::string name;
  std::string device;
  Edge edge = Edge::kLeft;
  std::string axis = "x";
  EdgeModelCoefficients coeffs;
  GaussianCoefficients gaussian;
  std::string units = "mm";
  std::string spec_version = std::string(kPresetSpecVersion);
  std::string comment;  ///< optional free text
};

/// Parses a preset document (a flat JSON object with fields name, device, edge,
/// axis, c..l, gaussian_a, gaussian_b, units, spec_version and an optional
/// comment). Throws Error(kInvalidCoefficients) on missing or malformed fields.
Preset parse_preset(std::string_view text);
std::string format_preset(const Preset& preset);

Preset load_preset_file(const std::filesystem::path& path);
void save_preset_file(const Preset& preset, const std::filesystem::path& path);

/// Constants measured against the left screen edge (index finger, one-handed grip).
Preset builtin_left_index_preset();
/// Constants measured against the bottom screen edge (index finger, one-handed grip).
Preset builtin_bottom_index_preset();

/// Read-only lookup of presets: built-ins, then files in an optional
/// directory (files override built-ins of the same name). Names not loaded at
/// construction are looked up on demand as <dir>/<name>.json without caching,
/// so a registry can be shared across threads.
class PresetRegistry {
 public:
  PresetRegistry();
  explicit PresetRegistry(std::optional<std::filesystem::path> directory);

  std::vector<std::string> names() const;
  std::optional<Preset> find(std::string_view name) const;
  /// Throws Error(kPresetNotFound).
  Preset get(std::string_view name) const;

  const std::optional<std::filesystem::path>& directory() const { return directory_; }

 private:
  std::map<std::string, Preset, std::less<>> presets_;
  std::optional<std::filesystem::path> directory_;
};

}  // namespace edgetap
