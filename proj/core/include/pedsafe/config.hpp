#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pedsafe/common.hpp"
#include "pedsafe/safety_types.hpp"
#include "pedsafe/scenario.hpp"

namespace pedsafe::harness {

struct ExperimentConfig {
  std::string scenario_name;
  world::ScenarioConfig scenario;  // built-in scenario with overrides applied
  std::vector<Mode> modes{Mode::single_vehicle, Mode::v2i};
  std::uint64_t episodes = 1000;
  std::uint64_t master_seed = 0;
  std::string output_dir = "pedsafe-out";
  unsigned workers = 1;
  bool write_trajectories = true;
  safety::SafetyParams safety;
};

/// Parses and validates a JSON config. Missing keys take defaults; unknown
/// keys anywhere are rejected. Throws ConfigError: malformed JSON reports
/// line and column, invalid values name the field.
ExperimentConfig parse_config(std::string_view text);

/// Throws IoError when the file cannot be read, ConfigError otherwise.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Complete JSON form of a config (every field explicit). parse_config on
/// the result yields an equal config.
std::string serialize_config(const ExperimentConfig& config);

/// Builds a config for a built-in scenario with every other field at its
/// default.
ExperimentConfig default_config(std::string_view scenario);

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

inline constexpr const char* kOutDirEnv = "PEDSAFE_OUT_DIR";

/// PEDSAFE_OUT_DIR when set and non-empty, else the config's output_dir.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

}  // namespace pedsafe::harness
