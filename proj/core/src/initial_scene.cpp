#include "pedsafe/initial_scene.hpp"

#include <cmath>
#include <numbers>
#include <type_traits>
#include <variant>
#include <string>

#include "pedsafe/distributions.hpp"
#include "pedsafe/error.hpp"

namespace pedsafe::stochastic {

namespace {

double log_uniform_density(double width) { return width > 0.0 ? -std::log(width) : 0.0; }

double uniform_between(double lo, double hi, RandomStream& rng) {
  return lo + rng.uniform() * (hi - lo);
}

double cell_weight(const DemographicsTable& table, const PedestrianProfile& p) {
  for (const auto& c : table.cells()) {
    if (c.age_group == p.age_group && c.gender == p.gender &&
        c.risk_preference == p.risk_preference) {
      return c.weight;
    }
  }
  return 0.0;
}

double log_truncated_normal_pdf(double x, double mean, double sd, double lower) {
  const double z = (x - mean) / sd;
  const double tail = 1.0 - normal_cdf((lower - mean) / sd);
  return -0.5 * z * z - std::log(sd * std::sqrt(2.0 * std::numbers::pi)) - std::log(tail);
}

[[noreturn]] void placement_error(const world::VehicleRoleSpec& v, const std::string& why) {
  throw PlacementError("vehicle '" + v.name + "': " + why);
}

}  // namespace

InitialScene sample_initial_scene(const world::ScenarioConfig& spec, const RandomStream& episode) {
  const auto& lanes = spec.layout.lanes;
  {
    std::vector<double> used(lanes.size(), 0.0);
    for (const auto& v : spec.vehicles) used[v.lane] += v.extent.length;
    for (std::size_t l = 0; l < lanes.size(); ++l) {
      if (used[l] > lanes[l].length()) {
        throw PlacementError("lane " + std::to_string(l) + " is too short for its vehicles");
      }
    }
  }

  const auto& speed_model = spec.layout.intersection ? spec.traffic.speed_intersection
                                                     : spec.traffic.speed_non_intersection;
  InitialScene scene;
  double log_density = 0.0;

  for (std::size_t i = 0; i < spec.vehicles.size(); ++i) {
    const auto& role = spec.vehicles[i];
    const auto& lane = lanes[role.lane];
    RandomStream rng = episode.substream(i);
    VehicleInit init;

    if (role.speed.fitted) {
      const double raw = sample_speed(speed_model, rng);
      if (spec.rules.speed_limit && raw > *spec.rules.speed_limit) {
        init.speed = *spec.rules.speed_limit;
        log_density += std::log(1.0 - lognormal_cdf(speed_model, init.speed));
      } else {
        init.speed = raw;
        log_density += std::log(lognormal_pdf(speed_model, raw));
      }
    } else {
      init.speed = role.speed.value;
    }

    const double half = role.extent.length / 2.0;
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, world::FixedPlacement>) {
            init.station = p.station + p.jitter * (2.0 * rng.uniform() - 1.0);
            log_density += log_uniform_density(2.0 * p.jitter);
          } else if constexpr (std::is_same_v<P, world::ArrivalPlacement>) {
            const double t = uniform_between(p.t_min, p.t_max, rng);
            init.arrival_time = t;
            init.station = p.conflict_station - half - init.speed * t;
            log_density += log_uniform_density(p.t_max - p.t_min);
          } else if constexpr (std::is_same_v<P, world::HeadwayPlacement>) {
            const auto& leader = scene.vehicles[p.leader];
            if (!(leader.speed > 0.0)) placement_error(role, "headway leader is not moving");
            const double h = sample_headway(spec.traffic.headway, rng);
            init.headway = h;
            const double leader_half = spec.vehicles[p.leader].extent.length / 2.0;
            init.station = leader.station - leader_half - h * leader.speed - half;
            log_density += std::log(exp_pdf(spec.traffic.headway, h));
          } else {
            init.station = uniform_between(p.s_min, p.s_max, rng);
            log_density += log_uniform_density(p.s_max - p.s_min);
          }
        },
        role.placement);

    if (init.station - half < 0.0 || init.station + half > lane.length()) {
      placement_error(role, "placed off its lane at station " + std::to_string(init.station));
    }
    init.position = lane.point_at(init.station);
    init.heading = lane.heading();
    scene.vehicles.push_back(init);
  }

  for (std::size_t j = 0; j < spec.pedestrians.size(); ++j) {
    const auto& role = spec.pedestrians[j];
    RandomStream rng = episode.substream(spec.vehicles.size() + j);
    PedestrianInit init;
    init.profile = sample_profile(spec.demographics, rng);
    const double x = uniform_between(role.origin_min.x(), role.origin_max.x(), rng);
    const double y = uniform_between(role.origin_min.y(), role.origin_max.y(), rng);
    init.position = Vec2(x, y);
    init.destination = Vec2(x, role.destination_y);

    const auto& table = spec.demographics;
    const auto bounds = age_bounds(init.profile.age_group);
    const auto& gs = table.speed(init.profile.age_group);
    log_density += std::log(cell_weight(table, init.profile));
    log_density += log_uniform_density(bounds.max_years - bounds.min_years);
    log_density += log_truncated_normal_pdf(init.profile.base_speed, gs.mean, gs.sd,
                                            table.min_speed());
    log_density += log_uniform_density(role.origin_max.x() - role.origin_min.x());
    log_density += log_uniform_density(role.origin_max.y() - role.origin_min.y());
    scene.pedestrians.push_back(init);
  }

  scene.log_density = log_density;
  return scene;
}

}  // namespace pedsafe::stochastic
