#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "pedsafe/config.hpp"
#include "pedsafe/episode.hpp"
#include "pedsafe/safety.hpp"

namespace pedsafe::harness {

struct ModeOutputs {
  Mode mode = Mode::single_vehicle;
  std::filesystem::path records;
  std::filesystem::path report_csv;
  std::filesystem::path report_json;
};

struct RunManifest {
  std::string tool_version;
  std::string timestamp;  // UTC, ISO 8601
  std::uint64_t master_seed = 0;
  std::string config_snapshot;
  std::filesystem::path path;
  std::vector<ModeOutputs> outputs;
  bool complete = false;
};

struct ExperimentResult {
  RunManifest manifest;
  std::vector<safety::SafetyReport> reports;  // one per mode, config order
};

std::string tool_version();

/// File names inside the output directory.
ModeOutputs mode_outputs(const std::filesystem::path& dir, Mode mode);
inline constexpr const char* kManifestName = "manifest.jsonl";

/// Seeded episode i of one mode, sampled and run.
world::EpisodeRecord run_one(const ExperimentConfig& config, Mode mode, std::uint64_t index);

/// Runs every mode: writes the manifest header, then each mode's records
/// (in episode order) and reports, then the completion marker. Outputs are
/// identical for any worker count. On an I/O failure the manifest is
/// closed with {"complete": false} and IoError is rethrown.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::function<void(Mode, std::uint64_t)>& progress = {});

/// Rebuilds a report from a records file.
safety::SafetyReport report_from_records(const std::filesystem::path& records,
                                         const std::string& scenario, Mode mode,
                                         const safety::SafetyParams& params);

}  // namespace pedsafe::harness
