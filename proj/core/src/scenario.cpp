#include "pedsafe/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "pedsafe/error.hpp"

namespace pedsafe::world {

std::string_view to_string(VehicleRole r) {
  switch (r) {
    case VehicleRole::ego: return "ego";
    case VehicleRole::occluder: return "occluder";
    case VehicleRole::background: return "background";
  }
  return "?";
}

std::string_view to_string(ControllerKind c) {
  switch (c) {
    case ControllerKind::ego_av: return "ego_av";
    case ControllerKind::parked: return "parked";
    case ControllerKind::cruise: return "cruise";
  }
  return "?";
}

int ScenarioConfig::ego_index() const {
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (vehicles[i].role == VehicleRole::ego) return static_cast<int>(i);
  }
  return -1;
}

void ScenarioConfig::validate() const {
  layout.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be positive");
  if (frames < 1) throw ConfigError("frames", "must be at least 1");
  int egos = 0;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const auto& v = vehicles[i];
    const std::string field = "vehicles[" + std::to_string(i) + "]";
    if (v.role == VehicleRole::ego) {
      ++egos;
      if (v.controller != ControllerKind::ego_av) {
        throw ConfigError(field + ".controller", "the ego must use the ego_av controller");
      }
    }
    if (v.lane < 0 || v.lane >= static_cast<int>(layout.lanes.size())) {
      throw ConfigError(field + ".lane", "lane index out of range");
    }
    if (!(v.extent.length > 0.0 && v.extent.width > 0.0 && v.extent.height > 0.0)) {
      throw ConfigError(field + ".extent", "extent components must be positive");
    }
    if (!v.speed.fitted && !(v.speed.value >= 0.0)) {
      throw ConfigError(field + ".speed", "fixed speed must be non-negative");
    }
    if (const auto* h = std::get_if<HeadwayPlacement>(&v.placement)) {
      if (h->leader < 0 || h->leader >= static_cast<int>(i)) {
        throw ConfigError(field + ".placement", "headway leader must be an earlier vehicle");
      }
      if (vehicles[h->leader].lane != v.lane) {
        throw ConfigError(field + ".placement", "headway leader must share the lane");
      }
    }
    if (const auto* a = std::get_if<ArrivalPlacement>(&v.placement)) {
      if (!(a->t_min >= 0.0 && a->t_max >= a->t_min)) {
        throw ConfigError(field + ".placement", "arrival window must satisfy 0 <= t_min <= t_max");
      }
    }
    if (const auto* u = std::get_if<UniformPlacement>(&v.placement)) {
      if (!(u->s_max >= u->s_min)) throw ConfigError(field + ".placement", "s_max < s_min");
    }
  }
  if (egos != 1) throw ConfigError("vehicles", "exactly one ego vehicle is required");
  for (std::size_t i = 0; i < pedestrians.size(); ++i) {
    const auto& p = pedestrians[i];
    const std::string field = "pedestrians[" + std::to_string(i) + "]";
    if ((p.origin_max - p.origin_min).minCoeff() < 0.0) {
      throw ConfigError(field + ".origin", "origin box max must not be below min");
    }
    if (!(p.height > 0.0 && p.radius > 0.0)) {
      throw ConfigError(field, "height and radius must be positive");
    }
  }
  if (rules.speed_limit && !(*rules.speed_limit > 0.0)) {
    throw ConfigError("rules.speed_limit", "must be positive");
  }
  const auto& b = behavior;
  if (!(b.a_brake > 0.0)) throw ConfigError("behavior.a_brake", "must be positive");
  if (!(b.resume_accel > 0.0)) throw ConfigError("behavior.resume_accel", "must be positive");
  if (!(b.awareness_radius >= 0.0)) throw ConfigError("behavior.awareness_radius", "must be >= 0");
  if (!(b.pass_first_multiplier >= 1.0)) {
    throw ConfigError("behavior.pass_first_multiplier", "must be >= 1");
  }
  if (!(b.yield_back_seconds >= 0.0)) throw ConfigError("behavior.yield_back_seconds", "must be >= 0");
  if (!(b.conflict_horizon > 0.0)) throw ConfigError("behavior.conflict_horizon", "must be positive");
  if (!(b.lookahead_margin >= 0.0)) throw ConfigError("behavior.lookahead_margin", "must be >= 0");
  sensors.onboard.validate("onboard");
  if (sensors.roadside.enabled) sensors.roadside.validate("roadside");
}

namespace {

constexpr double kLaneWidth = 3.5;
constexpr double kLaneHalfLength = 250.0;
constexpr Rgb kEgoBlue{0.1, 0.2, 0.8};
constexpr Rgb kBlack{0.05, 0.05, 0.05};
constexpr Rgb kRedJacket{0.8, 0.3, 0.2};
constexpr Rgb kGreyCoat{0.3, 0.3, 0.32};
constexpr Extent kVan{5.0, 1.9, 2.5};

double station(double x) { return x + kLaneHalfLength; }

double yaw_towards(const Vec2& from, const Vec2& to) {
  return std::atan2(to.y() - from.y(), to.x() - from.x()) * 180.0 / std::numbers::pi;
}

// Two same-direction lanes: lane 0 (ego) centered on y = 0 and lane 1 on
// y = 3.5. The pedestrian always crosses near x = 0 from the lane-1 side.
ScenarioConfig two_lane_base(std::string name, bool intersection) {
  ScenarioConfig s;
  s.name = std::move(name);
  s.layout.lanes = {
      Lane{Vec2(-kLaneHalfLength, 0.0), Vec2(kLaneHalfLength, 0.0), kLaneWidth},
      Lane{Vec2(-kLaneHalfLength, kLaneWidth), Vec2(kLaneHalfLength, kLaneWidth), kLaneWidth},
  };
  s.layout.intersection = intersection;
  return s;
}

VehicleRoleSpec ego(double t_min, double t_max) {
  VehicleRoleSpec v;
  v.name = "ego";
  v.role = VehicleRole::ego;
  v.controller = ControllerKind::ego_av;
  v.lane = 0;
  v.color = kEgoBlue;
  v.speed = SpeedRule{true, 0.0};
  v.placement = ArrivalPlacement{station(0.0), t_min, t_max};
  v.destination_station = station(60.0);
  return v;
}

VehicleRoleSpec parked(std::string name, double center_x, Rgb color, Extent extent = {}) {
  VehicleRoleSpec v;
  v.name = std::move(name);
  v.extent = extent;
  v.role = VehicleRole::occluder;
  v.controller = ControllerKind::parked;
  v.lane = 1;
  v.color = color;
  v.speed = SpeedRule{false, 0.0};
  v.placement = FixedPlacement{station(center_x), 0.0};
  v.destination_station = station(center_x);
  return v;
}

PedestrianRoleSpec crossing_pedestrian(double x_min, double x_max, double y_min, double y_max,
                                       Rgb color) {
  PedestrianRoleSpec p;
  p.name = "pedestrian";
  p.origin_min = Vec2(x_min, y_min);
  p.origin_max = Vec2(x_max, y_max);
  p.destination_y = -8.0;
  p.body_color = color;
  return p;
}

void place_roadside(ScenarioConfig& s, const Vec2& pole, const Vec2& aim) {
  s.sensors.roadside =
      perception::default_roadside_sensor(Vec3(pole.x(), pole.y(), 6.0), yaw_towards(pole, aim));
}

// Pedestrian steps off the curb just ahead of a queue of vans stopped in
// lane 1; the queue hides them from the ego until they are almost in its lane.
ScenarioConfig jaywalking() {
  auto s = two_lane_base("jaywalking", false);
  s.rules.speed_limit = 20.0;
  s.vehicles.push_back(ego(2.5, 5.5));
  for (int k = 0; k < 5; ++k) {
    s.vehicles.push_back(parked(fmt::format("occluder_{}", k + 1), -3.4 - 6.0 * k, kBlack, kVan));
  }
  s.pedestrians.push_back(crossing_pedestrian(-0.4, 0.6, 6.0, 7.5, kRedJacket));
  place_roadside(s, Vec2(10.0, 9.0), Vec2(0.0, 3.0));
  return s;
}

// Marked crosswalk at an intersection; a vehicle waiting at the stop line
// in lane 1 blocks the view of the crosswalk.
ScenarioConfig crossing() {
  auto s = two_lane_base("crossing", true);
  s.layout.crosswalk = Crosswalk{Vec2(0.0, 9.0), Vec2(0.0, -9.0), 4.0};
  s.rules.speed_limit = 14.0;
  s.rules.pedestrian_right_of_way = true;
  s.vehicles.push_back(ego(2.0, 5.0));
  s.vehicles.push_back(parked("occluder_1", -4.75, kBlack));
  s.vehicles.push_back(parked("occluder_2", -10.75, kBlack));
  s.pedestrians.push_back(crossing_pedestrian(-1.5, 1.5, 6.0, 7.5, kRedJacket));
  place_roadside(s, Vec2(10.0, -6.5), Vec2(0.0, 0.0));
  return s;
}

// Nothing blocks the view, but the pedestrian starts right in front of a
// parked car of the same color as their coat.
ScenarioConfig background_blending() {
  auto s = two_lane_base("background_blending", false);
  s.rules.speed_limit = 20.0;
  s.vehicles.push_back(ego(2.0, 5.0));
  // rear bumper at x = 0.5, 0.15-0.35 m behind the pedestrian
  s.vehicles.push_back(parked("backdrop", 2.75, kGreyCoat));
  s.pedestrians.push_back(crossing_pedestrian(-0.1, 0.1, 3.4, 4.3, kGreyCoat));
  place_roadside(s, Vec2(-4.0, -12.0), Vec2(0.0, -2.0));
  return s;
}

}  // namespace

ScenarioConfig builtin_scenario(std::string_view name) {
  ScenarioConfig s;
  if (name == "jaywalking") {
    s = jaywalking();
  } else if (name == "crossing") {
    s = crossing();
  } else if (name == "background_blending") {
    s = background_blending();
  } else {
    throw ConfigError("scenario", "unknown scenario '" + std::string(name) + "'");
  }
  s.validate();
  return s;
}

}  // namespace pedsafe::world
