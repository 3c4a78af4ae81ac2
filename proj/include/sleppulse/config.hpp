#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sleppulse/params.hpp"

namespace sleppulse {

// Flat key=value file. Accepted keys: alpha beta gamma D epsilon regime tau_hat theta_hat tau theta.
// '#' starts a comment. Unknown or repeated keys are errors.
struct RunConfig {
  ModelParams params;
  std::optional<TimeScale> rates;
  std::map<std::string, std::string> entries;  // as read, for the manifest
  std::vector<std::string> warnings;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// The rates, or ConfigError naming the missing keys.
TimeScale require_rates(const RunConfig& cfg);

}  // namespace sleppulse
