#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace edgetap::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,       ///< I/O, ingestion or fitting errors
  kUsage = 2,         ///< bad flags
  kPresetError = 3,   ///< unknown preset or unusable coefficients
};

/// Flag value, then $EDGETAP_PRESET_DIR, then the install location.
std::filesystem::path resolve_preset_dir(const std::optional<std::string>& flag);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace edgetap::cli
