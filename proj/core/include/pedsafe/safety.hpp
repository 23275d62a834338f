#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pedsafe/common.hpp"
#include "pedsafe/episode.hpp"
#include "pedsafe/safety_types.hpp"

namespace pedsafe::safety {

/// Predicted closest approach of two agents from one frame. Each agent
/// keeps its heading and current acceleration; a decelerating agent stops
/// and stays put. With zero acceleration this is the constant-velocity
/// prediction.
struct ClosestApproach {
  double distance = 0.0;  // center to center, m
  double tau = 0.0;       // s after the frame
};

ClosestApproach closest_approach(const world::AgentSample& a, const world::AgentSample& b,
                                 double horizon);

/// MD is the smallest predicted center distance over all frames minus
/// `contact_radius`; TMD and CS are read at the frame achieving it (the
/// earliest one on ties). Throws AlignmentError for empty or unequal
/// trajectories.
ConflictIndicators compute_indicators(std::span<const world::AgentSample> ego,
                                      std::span<const world::AgentSample> ped, double horizon,
                                      double dt, double contact_radius);

/// collision iff contact; conflict iff MD is under the proximity gate and
/// TMD or CS crosses its threshold; otherwise non_conflict.
EventLabel classify_event(const ConflictIndicators& ind, bool contact,
                          const SafetyParams& params = {});

/// P_I = p * logistic(-2.9893 + 0.0013 V^2 + 0.0286 A), V in the formula's
/// unit. Throws DomainError outside p in [0,1], V >= 0, A >= 0.
double injury_probability(double p_collision, double v, double age);

/// Converts a simulator speed (m/s) to the unit the injury formula uses.
double injury_speed(double v_ms, SpeedUnit unit);

/// Fills indicators, labels and outcome on a finished record.
void label_episode(world::EpisodeRecord& rec, const SafetyParams& params);

/// Ego-pedestrian distance at the first frame the ego perceives anyone.
std::optional<double> first_detection_distance(const world::EpisodeRecord& rec);

/// Nearest-rank percentile of an ascending sample; nullopt when empty.
std::optional<double> nearest_rank(std::span<const double> sorted, double p);

struct InjuryPoint {
  double v = 0.0;  // in the report's speed unit
  double age = 0.0;
  double p_injury = 0.0;
};

/// V in {0, 5, ..., 80} x A in {10, 20, ..., 80}.
std::vector<InjuryPoint> injury_surface(double p_collision);

struct SafetyReport {
  std::string scenario;
  Mode mode = Mode::single_vehicle;
  std::size_t episodes = 0;
  std::size_t collisions = 0;
  std::size_t conflicts = 0;
  std::size_t detected = 0;  // episodes with a first detection
  double collision_rate = 0.0;
  double conflict_rate = 0.0;
  double mean_injury = 0.0;
  std::optional<double> fdd_p10;
  std::optional<double> fdd_p50;
  std::optional<double> fdd_p90;
  SpeedUnit injury_speed_unit = SpeedUnit::kmh;
  std::vector<InjuryPoint> injury_surface;
};

/// What aggregation needs from one episode.
struct EpisodeSummary {
  EventLabel outcome = EventLabel::non_conflict;
  std::optional<world::CollisionEvent> collision;  // first contact
  std::optional<double> first_detection_distance;
  bool operator==(const EpisodeSummary&) const = default;
};

EpisodeSummary summarize(const world::EpisodeRecord& rec);

/// Throws AggregationError on an empty set.
SafetyReport aggregate(std::span<const EpisodeSummary> episodes, const std::string& scenario,
                       Mode mode, const SafetyParams& params = {});
SafetyReport aggregate(std::span<const world::EpisodeRecord> records, const std::string& scenario,
                       Mode mode, const SafetyParams& params = {});

}  // namespace pedsafe::safety
