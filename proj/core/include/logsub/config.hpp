#pragma once

#include <filesystem>
#include <string>

#include "logsub/harness.hpp"

namespace logsub {

// JSON config; every field is optional and falls back to
// HarnessConfig::defaults(d, gamma, beta). Unknown keys, bad values and
// invalid parameter bundles raise ConfigError.
HarnessConfig parse_config(const std::string& text);
HarnessConfig load_config(const std::filesystem::path& path);

// Round-trippable JSON echo of a config.
std::string config_to_json(const HarnessConfig& cfg);

}  // namespace logsub
