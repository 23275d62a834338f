#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pedsafe/common.hpp"
#include "pedsafe/demographics.hpp"
#include "pedsafe/distributions.hpp"
#include "pedsafe/road.hpp"
#include "pedsafe/sensor.hpp"

namespace pedsafe::world {

enum class VehicleRole { ego, occluder, background };
enum class ControllerKind { ego_av, parked, cruise };

std::string_view to_string(VehicleRole r);
std::string_view to_string(ControllerKind c);

struct Extent {
  double length = 4.5;
  double width = 1.9;
  double height = 1.5;
  bool operator==(const Extent&) const = default;
};

// Initial speed: drawn from the fitted model matching the layout's
// intersection flag, or a fixed value (0 for parked vehicles).
struct SpeedRule {
  bool fitted = true;
  double value = 0.0;
};

// Longitudinal placements, all in lane stations (meters from lane start).
struct FixedPlacement {
  double station = 0.0;
  double jitter = 0.0;  // uniform +/- jitter
};
/// Front bumper reaches `conflict_station` after t ~ U[t_min, t_max] at the
/// initial speed.
struct ArrivalPlacement {
  double conflict_station = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
};
/// Same lane, behind `leader`; bumper gap = headway sample * leader speed.
struct HeadwayPlacement {
  int leader = 0;
};
struct UniformPlacement {
  double s_min = 0.0;
  double s_max = 0.0;
};
using Placement = std::variant<FixedPlacement, ArrivalPlacement, HeadwayPlacement, UniformPlacement>;

struct VehicleRoleSpec {
  std::string name;
  VehicleRole role = VehicleRole::background;
  ControllerKind controller = ControllerKind::cruise;
  int lane = 0;
  Extent extent;
  Rgb color{0.5, 0.5, 0.5};
  SpeedRule speed;
  Placement placement = FixedPlacement{};
  double destination_station = 0.0;  // D(k)
};

struct PedestrianRoleSpec {
  std::string name;
  Vec2 origin_min = Vec2::Zero();  // origin ~ uniform over this box
  Vec2 origin_max = Vec2::Zero();
  double destination_y = 0.0;      // walks to (origin.x, destination_y)
  Rgb body_color{0.2, 0.2, 0.2};
  double height = 1.75;
  double radius = 0.25;
};

/// Traffic rules R.
struct Rules {
  std::optional<double> speed_limit;  // m/s, caps sampled speeds
  bool pedestrian_right_of_way = false;
};

/// Controller tuning. None of these come from field data.
struct BehaviorParams {
  double a_brake = 6.0;                 // m/s^2
  double resume_accel = 2.0;            // m/s^2
  double awareness_radius = 15.0;       // m
  double pass_first_multiplier = 1.5;
  double yield_back_seconds = 2.0;
  double conflict_horizon = 5.0;        // s
  double corridor_buffer = 1.0;         // m beyond the lane half width
  double lookahead_margin = 15.0;       // m past the distance covered in the horizon
  double arrival_tolerance = 0.1;       // m
  bool operator==(const BehaviorParams&) const = default;
};

struct TrafficModels {
  stochastic::ExponentialModel headway = stochastic::kHeadway;
  stochastic::LogNormalModel speed_non_intersection = stochastic::kSpeedNonIntersection;
  stochastic::LogNormalModel speed_intersection = stochastic::kSpeedIntersection;
  bool operator==(const TrafficModels&) const = default;
};

struct SensorSuite {
  perception::SensorSpec onboard = perception::default_onboard_sensor();
  perception::SensorSpec roadside;  // `enabled` false when absent
};

/// S(k, Theta) = {R, M(k), D(k), X(t)}: rules, per-role controllers and
/// destinations (inside the role specs), and the trajectory produced by
/// running it.
struct ScenarioConfig {
  std::string name;
  RoadLayout layout;
  std::vector<VehicleRoleSpec> vehicles;
  std::vector<PedestrianRoleSpec> pedestrians;
  Rules rules;
  SensorSuite sensors;
  int frames = 600;
  double dt = 0.05;
  BehaviorParams behavior;
  TrafficModels traffic;
  stochastic::DemographicsTable demographics = stochastic::DemographicsTable::uniform();

  int role_count() const { return static_cast<int>(vehicles.size() + pedestrians.size()); }
  int ego_index() const;
  /// Throws ConfigError on a malformed scenario.
  void validate() const;
};

inline constexpr std::string_view kBuiltinScenarios[] = {"crossing", "jaywalking",
                                                         "background_blending"};

/// Throws ConfigError for an unknown name.
ScenarioConfig builtin_scenario(std::string_view name);

}  // namespace pedsafe::world
