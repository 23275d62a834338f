#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pedsafe/episode.hpp"
#include "pedsafe/safety.hpp"

namespace pedsafe::harness {

/// One JSON line per episode. Fields, in order: episode, scenario, mode,
/// seed, dt, ego, num_vehicles, pedestrians, contact_radii, termination,
/// outcome, labels, indicators, collisions, first_detection_distance,
/// detections, frames. Each frame is a flat array
/// [frame, time, x, y, heading, speed, accel, ...] over all agents;
/// frames is omitted when trajectories are not written.
std::string record_to_json(const world::EpisodeRecord& rec, bool with_frames);

/// Inverse of record_to_json. Throws IoError on malformed lines.
world::EpisodeRecord record_from_json(std::string_view line);

/// Reads the summaries of a records file, checking that episode indices
/// run 0..N-1 in order. Throws IoError.
std::vector<safety::EpisodeSummary> read_summaries(const std::filesystem::path& path);

inline constexpr const char* kReportCsvHeader =
    "scenario,mode,episodes,collision_rate,conflict_rate,mean_injury,fdd_p10,fdd_p50,fdd_p90";

std::string report_to_csv(const safety::SafetyReport& r);
std::string report_to_json(const safety::SafetyReport& r);
safety::SafetyReport report_from_json(std::string_view text);

/// Writes text to path, throwing IoError on failure.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace pedsafe::harness
