#include "pedsafe/safety.hpp"

#include <algorithm>
#include <cmath>

#include "pedsafe/error.hpp"

namespace pedsafe::safety {

std::string_view to_string(EventLabel l) {
  switch (l) {
    case EventLabel::non_conflict: return "non_conflict";
    case EventLabel::conflict: return "conflict";
    case EventLabel::collision: return "collision";
  }
  return "?";
}

std::optional<EventLabel> event_label_from_string(std::string_view s) {
  for (auto l : {EventLabel::non_conflict, EventLabel::conflict, EventLabel::collision}) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

std::string_view to_string(SpeedUnit u) { return u == SpeedUnit::kmh ? "km/h" : "m/s"; }

std::optional<SpeedUnit> speed_unit_from_string(std::string_view s) {
  if (s == "km/h" || s == "kmh") return SpeedUnit::kmh;
  if (s == "m/s" || s == "ms") return SpeedUnit::ms;
  return std::nullopt;
}

double injury_probability(double p_collision, double v, double age) {
  if (!(p_collision >= 0.0 && p_collision <= 1.0)) {
    throw DomainError("collision probability must lie in [0, 1]");
  }
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("impact speed must be >= 0");
  if (!(age >= 0.0) || !std::isfinite(age)) throw DomainError("age must be >= 0");
  const double l = -2.9893 + 0.0013 * v * v + 0.0286 * age;
  const double logistic = l >= 0.0 ? 1.0 / (1.0 + std::exp(-l)) : std::exp(l) / (1.0 + std::exp(l));
  return p_collision * logistic;
}

double injury_speed(double v_ms, SpeedUnit unit) {
  return unit == SpeedUnit::kmh ? v_ms * 3.6 : v_ms;
}

void label_episode(world::EpisodeRecord& rec, const SafetyParams& params) {
  const std::size_t n = rec.pedestrians.size();
  rec.indicators.assign(n, {});
  rec.labels.assign(n, EventLabel::non_conflict);
  rec.outcome = EventLabel::non_conflict;
  if (rec.frames.empty()) return;

  std::vector<world::AgentSample> ego;
  std::vector<world::AgentSample> ped;
  ego.reserve(rec.frames.size());
  ped.reserve(rec.frames.size());
  for (std::size_t j = 0; j < n; ++j) {
    ego.clear();
    ped.clear();
    for (const auto& f : rec.frames) {
      ego.push_back(f.agents[rec.ego]);
      ped.push_back(f.agents[rec.pedestrian_agent(static_cast<int>(j))]);
    }
    rec.indicators[j] = compute_indicators(ego, ped, params.horizon, rec.dt, rec.contact_radii[j]);
    const bool contact = std::any_of(rec.collisions.begin(), rec.collisions.end(),
                                     [&](const auto& c) { return c.pedestrian == static_cast<int>(j); });
    rec.labels[j] = classify_event(rec.indicators[j], contact, params);
    rec.outcome = std::max(rec.outcome, rec.labels[j]);
  }
}

std::optional<double> first_detection_distance(const world::EpisodeRecord& rec) {
  if (rec.detections.empty()) return std::nullopt;
  const auto first = std::min_element(rec.detections.begin(), rec.detections.end(),
                                      [](const auto& a, const auto& b) { return a.frame < b.frame; });
  const auto& frame = rec.frames.at(static_cast<std::size_t>(first->frame));
  const auto& ego = frame.agents.at(rec.ego);
  const auto& ped = frame.agents.at(rec.pedestrian_agent(first->pedestrian));
  return (ped.position() - ego.position()).norm();
}

std::optional<double> nearest_rank(std::span<const double> sorted, double p) {
  if (sorted.empty()) return std::nullopt;
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<InjuryPoint> injury_surface(double p_collision) {
  std::vector<InjuryPoint> out;
  for (int v = 0; v <= 80; v += 5) {
    for (int a = 10; a <= 80; a += 10) {
      out.push_back({double(v), double(a), injury_probability(p_collision, v, a)});
    }
  }
  return out;
}

EpisodeSummary summarize(const world::EpisodeRecord& rec) {
  EpisodeSummary s;
  s.outcome = rec.outcome;
  if (!rec.collisions.empty()) s.collision = rec.collisions.front();
  s.first_detection_distance = first_detection_distance(rec);
  return s;
}

SafetyReport aggregate(std::span<const EpisodeSummary> episodes, const std::string& scenario,
                       Mode mode, const SafetyParams& params) {
  if (episodes.empty()) throw AggregationError("no episodes to aggregate");
  SafetyReport r;
  r.scenario = scenario;
  r.mode = mode;
  r.episodes = episodes.size();
  r.injury_speed_unit = params.injury_speed_unit;

  double injury_sum = 0.0;
  std::vector<double> fdd;
  for (const auto& e : episodes) {
    if (e.outcome == EventLabel::collision) {
      ++r.collisions;
      if (e.collision) {
        injury_sum += injury_probability(
            1.0, injury_speed(e.collision->impact_speed, params.injury_speed_unit),
            e.collision->pedestrian_age);
      }
    } else if (e.outcome == EventLabel::conflict) {
      ++r.conflicts;
    }
    if (e.first_detection_distance) fdd.push_back(*e.first_detection_distance);
  }
  const double n = static_cast<double>(r.episodes);
  r.collision_rate = r.collisions / n;
  r.conflict_rate = r.conflicts / n;
  r.mean_injury = r.collisions > 0 ? injury_sum / r.collisions * r.collision_rate : 0.0;

  std::sort(fdd.begin(), fdd.end());
  r.detected = fdd.size();
  r.fdd_p10 = nearest_rank(fdd, 0.10);
  r.fdd_p50 = nearest_rank(fdd, 0.50);
  r.fdd_p90 = nearest_rank(fdd, 0.90);
  r.injury_surface = injury_surface(r.collision_rate);
  return r;
}

SafetyReport aggregate(std::span<const world::EpisodeRecord> records, const std::string& scenario,
                       Mode mode, const SafetyParams& params) {
  std::vector<EpisodeSummary> s;
  s.reserve(records.size());
  for (const auto& rec : records) s.push_back(summarize(rec));
  return aggregate(s, scenario, mode, params);
}

}  // namespace pedsafe::safety
