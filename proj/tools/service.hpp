#pragma once

#include <string>

#include "edgetap/preset.hpp"
#include "httplib.h"

namespace edgetap::service {

/// Registers /predict, /presets, /curve and /health. Handlers only read the
/// registry, which must outlive the server.
void install_routes(httplib::Server& server, const PresetRegistry& presets);

/// Blocks until the server stops. Returns false if the port cannot be bound.
bool serve(const std::string& host, int port, const PresetRegistry& presets);

}  // namespace edgetap::service
