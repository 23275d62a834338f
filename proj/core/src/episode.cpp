#include "pedsafe/episode.hpp"

#include <cmath>
#include <string>

#include "pedsafe/error.hpp"
#include "pedsafe/perception.hpp"
#include "pedsafe/safety.hpp"
#include "pedsafe/world.hpp"

namespace pedsafe::world {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::arrived: return "arrived";
    case Termination::collision: return "collision";
    case Termination::frame_budget: return "frame_budget";
  }
  return "?";
}

std::optional<Termination> termination_from_string(std::string_view s) {
  for (auto t : {Termination::arrived, Termination::collision, Termination::frame_budget}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

namespace {

FrameRecord snapshot(const WorldState& w) {
  FrameRecord f;
  f.frame = w.frame;
  f.time = w.time;
  f.agents.reserve(w.vehicles.size() + w.pedestrians.size());
  for (const auto& v : w.vehicles) {
    f.agents.push_back({v.position.x(), v.position.y(), v.heading, v.speed, v.accel});
  }
  for (const auto& p : w.pedestrians) {
    f.agents.push_back({p.position.x(), p.position.y(), p.heading, p.speed, 0.0});
  }
  return f;
}

void check_finite(const FrameRecord& f) {
  for (std::size_t i = 0; i < f.agents.size(); ++i) {
    const auto& a = f.agents[i];
    if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(a.heading) ||
        !std::isfinite(a.speed) || !std::isfinite(a.accel)) {
      throw NumericalFaultError("non-finite state for agent " + std::to_string(i) + " at frame " +
                                std::to_string(f.frame));
    }
  }
}

}  // namespace

EpisodeRecord run_episode(const ScenarioConfig& spec, const stochastic::InitialScene& theta,
                          Mode mode, const RandomStream& episode,
                          const safety::SafetyParams& safety) {
  EpisodeRecord rec;
  rec.scenario = spec.name;
  rec.mode = mode;
  rec.seed = episode.seed();
  rec.dt = spec.dt;
  rec.ego = spec.ego_index();
  rec.num_vehicles = static_cast<int>(spec.vehicles.size());
  for (const auto& p : theta.pedestrians) rec.pedestrians.push_back(p.profile);

  WorldState w = initial_world(spec, theta);
  const double ego_half_width = spec.vehicles[rec.ego].extent.width / 2.0;
  for (const auto& p : w.pedestrians) rec.contact_radii.push_back(ego_half_width + p.radius);

  auto perception = perception::PerceptionState::open(episode);
  rec.termination = Termination::frame_budget;
  for (int f = 0; f < spec.frames; ++f) {
    auto detections = perception::perceive(w, mode, spec, perception);
    apply_controls(w, spec, detections);
    rec.detections.insert(rec.detections.end(), detections.begin(), detections.end());
    rec.frames.push_back(snapshot(w));
    check_finite(rec.frames.back());

    if (auto contact = check_collision(w)) {
      rec.collisions.push_back({w.frame, contact->pedestrian, contact->impact_speed,
                                contact->pedestrian_age});
      rec.termination = Termination::collision;
      break;
    }
    if (all_arrived(w)) {
      rec.termination = Termination::arrived;
      break;
    }
    integrate(w, spec.dt);
  }

  safety::label_episode(rec, safety);
  return rec;
}

}  // namespace pedsafe::world
