#include "pedsafe/world.hpp"

#include <algorithm>
#include <cmath>

namespace pedsafe::world {

namespace {

Vec2 to_frame(const Vec2& p, const Vec2& origin, double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  const Vec2 d = p - origin;
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
}

Vec2 rotate_into(const Vec2& v, double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return {c * v.x() + s * v.y(), -s * v.x() + c * v.y()};
}

// Liang-Barsky: does p + v*t for t in [0, t_max] touch the box?
bool segment_hits_box(const Vec2& p, const Vec2& v, double t_max, const Vec2& lo, const Vec2& hi) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int axis = 0; axis < 2; ++axis) {
    if (v[axis] == 0.0) {
      if (p[axis] < lo[axis] || p[axis] > hi[axis]) return false;
      continue;
    }
    double ta = (lo[axis] - p[axis]) / v[axis];
    double tb = (hi[axis] - p[axis]) / v[axis];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

// Closed disc-rectangle overlap.
bool touches(const VehicleState& v, const Vec2& center, double radius) {
  const Vec2 half(v.extent.length / 2.0, v.extent.width / 2.0);
  const Vec2 local = to_frame(center, v.position, v.heading);
  const Vec2 nearest = local.cwiseMax(-half).cwiseMin(half);
  return (local - nearest).norm() <= radius;
}

// A moving vehicle nearby, closing in, whose line of travel still lies
// between the pedestrian and their destination.
bool is_threat(const VehicleState& v, const PedestrianState& p, double radius) {
  if (v.speed <= 0.1) return false;
  const Vec2 d = p.position - v.position;
  if (d.norm() > radius) return false;
  if (d.dot(v.velocity() - p.velocity()) <= 0.0) return false;
  const Vec2 left(-std::sin(v.heading), std::cos(v.heading));
  return d.dot(left) * (p.destination - v.position).dot(left) < 0.0;
}

void control_ego(WorldState& w, const ScenarioConfig& spec,
                 std::span<const perception::Detection> detections) {
  auto& ego = w.vehicles[w.ego];
  for (const auto& d : detections) w.ego_tracking[d.pedestrian] = true;

  const auto& b = spec.behavior;
  const double lane_width = spec.layout.lanes[ego.lane].width;
  bool conflict = false;
  for (std::size_t j = 0; j < w.pedestrians.size(); ++j) {
    if (!w.ego_tracking[j]) continue;
    const auto& ped = w.pedestrians[j];
    if (w.ego_yielding[j]) {
      w.ego_yielding[j] = !cleared_corridor(ego, ped, b, lane_width);
    } else {
      w.ego_yielding[j] = path_conflict(ego, ped, b, lane_width);
    }
    conflict = conflict || w.ego_yielding[j];
  }
  if (conflict) {
    ego.accel = ego.speed > 0.0 ? -b.a_brake : 0.0;
  } else if (ego.speed < ego.cruise_speed) {
    ego.accel = std::min(b.resume_accel, (ego.cruise_speed - ego.speed) / spec.dt);
  } else {
    ego.accel = 0.0;
  }
}

void control_pedestrian(WorldState& w, PedestrianState& p, const ScenarioConfig& spec) {
  const auto& b = spec.behavior;
  if (p.phase == PedestrianPhase::arrived) {
    p.speed = 0.0;
    return;
  }
  const Vec2 to_goal = p.destination - p.position;
  if (to_goal.norm() <= b.arrival_tolerance) {
    p.phase = PedestrianPhase::arrived;
    p.speed = 0.0;
    return;
  }
  const double goal_heading = std::atan2(to_goal.y(), to_goal.x());
  const bool threat = std::any_of(w.vehicles.begin(), w.vehicles.end(), [&](const auto& v) {
    return is_threat(v, p, b.awareness_radius);
  });

  if (!threat) p.phase = PedestrianPhase::walking;
  switch (p.phase) {
    case PedestrianPhase::walking:
      p.heading = goal_heading;
      p.speed = p.profile.base_speed;
      if (threat) {
        switch (p.profile.risk_preference) {
          case stochastic::RiskPreference::unaware:
            break;
          case stochastic::RiskPreference::pass_first:
            p.speed *= b.pass_first_multiplier;
            break;
          case stochastic::RiskPreference::yield_back:
            p.phase = PedestrianPhase::backing;
            p.backing_time = 0.0;
            break;
        }
      }
      if (p.phase != PedestrianPhase::backing) break;
      [[fallthrough]];
    case PedestrianPhase::backing:
      if (p.backing_time >= b.yield_back_seconds) {
        p.phase = PedestrianPhase::waiting;
        p.speed = 0.0;
        break;
      }
      p.heading = std::atan2(-to_goal.y(), -to_goal.x());
      p.speed = p.profile.base_speed;
      p.backing_time += spec.dt;
      break;
    case PedestrianPhase::waiting:
      p.speed = 0.0;
      break;
    case PedestrianPhase::arrived:
      break;
  }
  if (p.speed > 0.0) {
    const Vec2 next = p.position + p.velocity() * spec.dt;
    const bool blocked = std::any_of(w.vehicles.begin(), w.vehicles.end(), [&](const auto& v) {
      return v.speed <= 0.0 && touches(v, next, p.radius);
    });
    if (blocked) p.speed = 0.0;
  }
}

}  // namespace

WorldState initial_world(const ScenarioConfig& spec, const stochastic::InitialScene& theta) {
  WorldState w;
  w.ego = spec.ego_index();
  for (std::size_t i = 0; i < spec.vehicles.size(); ++i) {
    const auto& role = spec.vehicles[i];
    const auto& init = theta.vehicles[i];
    VehicleState v;
    v.position = init.position;
    v.heading = init.heading;
    v.speed = init.speed;
    v.cruise_speed = init.speed;
    v.extent = role.extent;
    v.role = role.role;
    v.controller = role.controller;
    v.color = role.color;
    v.lane = role.lane;
    v.destination = spec.layout.lanes[role.lane].point_at(role.destination_station);
    v.arrived = init.station >= role.destination_station;
    w.vehicles.push_back(v);
  }
  for (std::size_t j = 0; j < spec.pedestrians.size(); ++j) {
    const auto& role = spec.pedestrians[j];
    const auto& init = theta.pedestrians[j];
    PedestrianState p;
    p.position = init.position;
    p.destination = init.destination;
    p.profile = init.profile;
    p.body_color = role.body_color;
    p.height = role.height;
    p.radius = role.radius;
    const Vec2 d = init.destination - init.position;
    p.heading = std::atan2(d.y(), d.x());
    p.speed = init.profile.base_speed;
    w.pedestrians.push_back(p);
  }
  w.ego_tracking.assign(w.pedestrians.size(), false);
  w.ego_yielding.assign(w.pedestrians.size(), false);
  return w;
}

std::array<Vec2, 4> footprint(const VehicleState& v) {
  const Vec2 f = unit_heading(v.heading) * (v.extent.length / 2.0);
  const Vec2 l = Vec2(-std::sin(v.heading), std::cos(v.heading)) * (v.extent.width / 2.0);
  const Vec2& c = v.position;
  return {c - f - l, c + f - l, c + f + l, c - f + l};
}

geometry::RigidTransform body_to_world(const VehicleState& v) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(v.heading, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return geometry::RigidTransform::from_rotation_translation(
      r, Eigen::Vector3d(v.position.x(), v.position.y(), 0.0));
}

bool path_conflict(const VehicleState& ego, const PedestrianState& ped, const BehaviorParams& b,
                   double lane_width) {
  const double half_len = ego.extent.length / 2.0;
  const double reach =
      std::max(ego.speed, ego.cruise_speed) * b.conflict_horizon + b.lookahead_margin;
  // Starts at the front bumper: braking cannot help with anything alongside.
  const Vec2 lo(half_len, -(lane_width / 2.0 + b.corridor_buffer));
  const Vec2 hi(half_len + reach, lane_width / 2.0 + b.corridor_buffer);
  const Vec2 p = to_frame(ped.position, ego.position, ego.heading);
  const Vec2 v = rotate_into(ped.velocity(), ego.heading);
  return segment_hits_box(p, v, b.conflict_horizon, lo, hi);
}

bool cleared_corridor(const VehicleState& ego, const PedestrianState& ped, const BehaviorParams& b,
                      double lane_width) {
  if (ped.phase == PedestrianPhase::arrived) return true;
  const double side = to_frame(ped.destination, ego.position, ego.heading).y();
  const Vec2 p = to_frame(ped.position, ego.position, ego.heading);
  if (p.x() < ego.extent.length / 2.0) return true;
  return p.y() * side > 0.0 && std::abs(p.y()) > lane_width / 2.0 + b.corridor_buffer;
}

void apply_controls(WorldState& w, const ScenarioConfig& spec,
                    std::span<const perception::Detection> detections) {
  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    auto& v = w.vehicles[i];
    if (static_cast<int>(i) == w.ego) continue;
    v.accel = 0.0;
    if (v.controller == ControllerKind::parked) v.speed = 0.0;
  }
  if (w.ego >= 0) control_ego(w, spec, detections);
  for (auto& p : w.pedestrians) control_pedestrian(w, p, spec);
}

void integrate(WorldState& w, double dt) {
  for (auto& v : w.vehicles) {
    double travel = 0.0;
    if (v.accel < 0.0 && v.speed + v.accel * dt <= 0.0) {
      travel = v.speed * v.speed / (-2.0 * v.accel);
      v.speed = 0.0;
    } else {
      travel = v.speed * dt + 0.5 * v.accel * dt * dt;
      v.speed = std::max(0.0, v.speed + v.accel * dt);
    }
    v.position += unit_heading(v.heading) * travel;
    if (unit_heading(v.heading).dot(v.destination - v.position) <= 0.0) v.arrived = true;
  }
  for (auto& p : w.pedestrians) {
    if (p.speed <= 0.0) continue;
    const Vec2 step = p.velocity() * dt;
    const Vec2 to_goal = p.destination - p.position;
    if (p.phase == PedestrianPhase::walking && step.norm() >= to_goal.norm()) {
      p.position = p.destination;
      p.phase = PedestrianPhase::arrived;
      p.speed = 0.0;
    } else {
      p.position += step;
    }
  }
  w.frame += 1;
  w.time = w.frame * dt;
}

WorldState step(const WorldState& w, const ScenarioConfig& spec,
                std::span<const perception::Detection> detections, double dt) {
  WorldState next = w;
  apply_controls(next, spec, detections);
  integrate(next, dt);
  return next;
}

std::optional<Contact> check_collision(const WorldState& w) {
  if (w.ego < 0) return std::nullopt;
  const auto& ego = w.vehicles[w.ego];
  for (std::size_t j = 0; j < w.pedestrians.size(); ++j) {
    const auto& p = w.pedestrians[j];
    if (touches(ego, p.position, p.radius)) {
      return Contact{static_cast<int>(j), ego.speed, p.profile.age};
    }
  }
  return std::nullopt;
}

bool all_arrived(const WorldState& w) {
  for (const auto& v : w.vehicles) {
    if (!v.arrived) return false;
  }
  for (const auto& p : w.pedestrians) {
    if (p.phase != PedestrianPhase::arrived) return false;
  }
  return true;
}

}  // namespace pedsafe::world
