#pragma once

#include <optional>
#include <vector>

#include "pedsafe/common.hpp"
#include "pedsafe/demographics.hpp"
#include "pedsafe/random.hpp"
#include "pedsafe/scenario.hpp"

namespace pedsafe::stochastic {

struct VehicleInit {
  double station = 0.0;  // center, along its lane
  double speed = 0.0;
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
  std::optional<double> headway;       // s, HeadwayPlacement only
  std::optional<double> arrival_time;  // s, ArrivalPlacement only
};

struct PedestrianInit {
  Vec2 position = Vec2::Zero();
  Vec2 destination = Vec2::Zero();
  PedestrianProfile profile;
};

/// One draw of the initial parameter set Theta.
struct InitialScene {
  std::vector<VehicleInit> vehicles;
  std::vector<PedestrianInit> pedestrians;
  double log_density = 0.0;  // sum of independent per-parameter log densities
};

/// Vehicle i draws from episode.substream(i) and pedestrian j from
/// episode.substream(vehicles + j), so adding a role never shifts the
/// draws of the roles before it. Throws PlacementError when a vehicle
/// cannot be placed on its lane.
InitialScene sample_initial_scene(const world::ScenarioConfig& spec, const RandomStream& episode);

}  // namespace pedsafe::stochastic
