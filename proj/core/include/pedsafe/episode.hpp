#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pedsafe/common.hpp"
#include "pedsafe/detection.hpp"
#include "pedsafe/initial_scene.hpp"
#include "pedsafe/random.hpp"
#include "pedsafe/safety_types.hpp"
#include "pedsafe/scenario.hpp"

namespace pedsafe::world {

/// One agent at one frame. Pedestrians carry accel = 0.
struct AgentSample {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double accel = 0.0;

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return unit_heading(heading) * speed; }
  bool operator==(const AgentSample&) const = default;
};

/// X(t): vehicles first, then pedestrians, in role order.
struct FrameRecord {
  int frame = 0;
  double time = 0.0;
  std::vector<AgentSample> agents;
  bool operator==(const FrameRecord&) const = default;
};

struct CollisionEvent {
  int frame = 0;
  int pedestrian = 0;
  double impact_speed = 0.0;  // m/s
  double pedestrian_age = 0.0;
  bool operator==(const CollisionEvent&) const = default;
};

enum class Termination { arrived, collision, frame_budget };

std::string_view to_string(Termination t);
std::optional<Termination> termination_from_string(std::string_view s);

struct EpisodeRecord {
  std::string scenario;
  Mode mode = Mode::single_vehicle;
  std::uint64_t episode_index = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  int ego = 0;
  int num_vehicles = 0;
  std::vector<stochastic::PedestrianProfile> pedestrians;
  std::vector<double> contact_radii;  // ego half width + pedestrian radius
  std::vector<FrameRecord> frames;
  std::vector<perception::Detection> detections;
  std::vector<CollisionEvent> collisions;
  Termination termination = Termination::frame_budget;
  std::vector<safety::ConflictIndicators> indicators;  // per pedestrian
  std::vector<safety::EventLabel> labels;              // per pedestrian
  safety::EventLabel outcome = safety::EventLabel::non_conflict;

  int pedestrian_agent(int j) const { return num_vehicles + j; }
};

/// Runs one episode from Theta. Per frame: perceive, apply controls,
/// record, check contact, integrate. Stops when every agent has arrived,
/// on contact, or when the frame budget runs out, then labels each
/// pedestrian with the safety indicators. Throws NumericalFaultError on a
/// non-finite state.
EpisodeRecord run_episode(const ScenarioConfig& spec, const stochastic::InitialScene& theta,
                          Mode mode, const RandomStream& episode,
                          const safety::SafetyParams& safety = {});

}  // namespace pedsafe::world
