#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "pedsafe/common.hpp"
#include "pedsafe/demographics.hpp"
#include "pedsafe/detection.hpp"
#include "pedsafe/geometry.hpp"
#include "pedsafe/initial_scene.hpp"
#include "pedsafe/scenario.hpp"

namespace pedsafe::world {

struct VehicleState {
  Vec2 position = Vec2::Zero();  // footprint center
  double heading = 0.0;          // rad
  double speed = 0.0;            // m/s, >= 0
  double accel = 0.0;            // m/s^2, along heading
  Extent extent;
  VehicleRole role = VehicleRole::background;
  ControllerKind controller = ControllerKind::cruise;
  Rgb color;
  int lane = 0;
  double cruise_speed = 0.0;
  Vec2 destination = Vec2::Zero();  // arrived once the center passes it
  bool arrived = false;

  Vec2 velocity() const { return unit_heading(heading) * speed; }
};

enum class PedestrianPhase { walking, backing, waiting, arrived };

struct PedestrianState {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;  // direction of motion
  double speed = 0.0;
  stochastic::PedestrianProfile profile;
  Rgb body_color;
  double height = 1.75;
  double radius = 0.25;
  Vec2 destination = Vec2::Zero();
  PedestrianPhase phase = PedestrianPhase::walking;
  double backing_time = 0.0;  // s spent stepping back in the current yield

  Vec2 velocity() const { return unit_heading(heading) * speed; }
};

struct WorldState {
  int frame = 0;
  double time = 0.0;
  std::vector<VehicleState> vehicles;
  std::vector<PedestrianState> pedestrians;
  int ego = 0;
  // Per pedestrian: the ego has perceived them at least once and keeps
  // tracking them from then on.
  std::vector<bool> ego_tracking;
  // Per pedestrian: the ego is holding back for them until they clear.
  std::vector<bool> ego_yielding;
};

WorldState initial_world(const ScenarioConfig& spec, const stochastic::InitialScene& theta);

/// Counter-clockwise footprint corners.
std::array<Vec2, 4> footprint(const VehicleState& v);

/// Ego body frame (x forward, y left, z up, origin at the footprint center
/// on the ground) -> world.
geometry::RigidTransform body_to_world(const VehicleState& v);

/// True when the pedestrian, moving at its current velocity, is inside or
/// enters the ego's swept corridor within the behavior horizon. The
/// corridor starts at the front bumper and reaches past the distance the
/// ego would cover at its cruise speed, so a braking ego does not release
/// early.
bool path_conflict(const VehicleState& ego, const PedestrianState& ped, const BehaviorParams& b,
                   double lane_width);

/// True once the pedestrian has arrived, is no longer ahead of the front
/// bumper, or stands beyond the corridor on the side of their destination.
bool cleared_corridor(const VehicleState& ego, const PedestrianState& ped, const BehaviorParams& b,
                      double lane_width);

/// Sets vehicle accelerations and pedestrian velocities for this frame.
void apply_controls(WorldState& w, const ScenarioConfig& spec,
                    std::span<const perception::Detection> detections);

/// Advances every agent by dt under the commanded controls. Acceleration
/// is held constant over the frame and integrated exactly; a braking
/// vehicle stops instead of reversing.
void integrate(WorldState& w, double dt);

/// apply_controls followed by integrate, on a copy.
WorldState step(const WorldState& w, const ScenarioConfig& spec,
                std::span<const perception::Detection> detections, double dt);

struct Contact {
  int pedestrian = 0;
  double impact_speed = 0.0;  // ego speed, m/s
  double pedestrian_age = 0.0;
};

/// First pedestrian (by index) whose footprint disc touches the ego's
/// footprint rectangle. Tangency counts as contact.
std::optional<Contact> check_collision(const WorldState& w);

bool all_arrived(const WorldState& w);

}  // namespace pedsafe::world
