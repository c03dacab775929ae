#pragma once

#include <filesystem>
#include <string>

#include "echomap/harness.hpp"

namespace echomap {

/// Reads a JSON experiment description on top of the defaults. Unknown keys
/// and ill-typed values raise ConfigError.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);

/// Full configuration as pretty-printed JSON, keys sorted.
std::string config_echo(const ExperimentConfig& cfg);

}  // namespace echomap
