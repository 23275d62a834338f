#pragma once

#include <optional>
#include <string_view>

namespace pedsafe::safety {

/// Surrogate safety measures for one vehicle-pedestrian pair.
struct ConflictIndicators {
  double md = 0.0;   // m, signed: below zero the predicted bodies overlap
  double tmd = 0.0;  // s
  double cs = 0.0;   // m/s
  int frame = 0;     // frame achieving md
  bool operator==(const ConflictIndicators&) const = default;
};

enum class EventLabel { non_conflict, conflict, collision };

std::string_view to_string(EventLabel l);
std::optional<EventLabel> event_label_from_string(std::string_view s);

enum class SpeedUnit { kmh, ms };

std::string_view to_string(SpeedUnit u);
std::optional<SpeedUnit> speed_unit_from_string(std::string_view s);

struct SafetyParams {
  double horizon = 5.0;          // s
  double conflict_gate = 5.0;    // m
  double tmd_threshold = 1.5;    // s
  double cs_threshold = 1.0;     // m/s
  SpeedUnit injury_speed_unit = SpeedUnit::kmh;
  bool operator==(const SafetyParams&) const = default;
};

}  // namespace pedsafe::safety
