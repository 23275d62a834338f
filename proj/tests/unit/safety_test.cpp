#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "pedsafe/episode.hpp"
#include "pedsafe/error.hpp"
#include "pedsafe/initial_scene.hpp"
#include "pedsafe/random.hpp"
#include "pedsafe/safety.hpp"
#include "pedsafe/scenario.hpp"

namespace pedsafe::safety {
namespace {

using world::AgentSample;

AgentSample agent(double x, double y, double heading, double speed, double accel = 0.0) {
  return AgentSample{x, y, heading, speed, accel};
}

// Brute-force kinematics with a stop clamp, scanned on a fine grid.
Vec2 oracle_position(const AgentSample& a, double t) {
  const double t_stop = a.accel < 0.0 ? a.speed / -a.accel : std::numeric_limits<double>::infinity();
  const double tt = std::min(t, t_stop);
  return a.position() + Vec2(std::cos(a.heading), std::sin(a.heading)) * (a.speed * tt + 0.5 * a.accel * tt * tt);
}

struct Scan {
  double distance;
  double tau;
};

Scan oracle_scan(const AgentSample& a, const AgentSample& b, double horizon, double step = 0.001) {
  Scan best{std::numeric_limits<double>::infinity(), 0.0};
  const int n = static_cast<int>(std::round(horizon / step));
  for (int i = 0; i <= n; ++i) {
    const double t = i * step;
    const double d = (oracle_position(b, t) - oracle_position(a, t)).norm();
    if (d < best.distance) best = {d, t};
  }
  return best;
}

double logistic(double l) { return 1.0 / (1.0 + std::exp(-l)); }

TEST(Indicators, ParallelAgents) {
  std::vector<AgentSample> ego, ped;
  for (int f = 0; f < 10; ++f) {
    ego.push_back(agent(0.3 * f, 0.0, 0.0, 6.0));
    ped.push_back(agent(0.3 * f, 5.0, 0.0, 6.0));
  }
  const auto ind = compute_indicators(ego, ped, 5.0, 0.05, 1.2);
  EXPECT_NEAR(ind.md, 5.0 - 1.2, 1e-12);
  EXPECT_EQ(ind.tmd, 0.0);
  EXPECT_EQ(ind.cs, 0.0);
  EXPECT_EQ(ind.frame, 0);
}

TEST(Indicators, HeadOnStationaryPedestrian) {
  std::vector<AgentSample> ego, ped;
  for (int f = 0; f < 5; ++f) {
    ego.push_back(agent(0.5 * f, 0.0, 0.0, 10.0));
    ped.push_back(agent(20.0, 0.0, 0.0, 0.0));
  }
  const auto ind = compute_indicators(ego, ped, 5.0, 0.05, 1.2);
  EXPECT_EQ(ind.frame, 0);
  EXPECT_NEAR(ind.tmd, 2.0, 1e-9);
  EXPECT_LE(ind.md, 0.0);
  EXPECT_NEAR(ind.cs, 10.0, 1e-12);
  const auto scan = oracle_scan(ego[0], ped[0], 5.0);
  EXPECT_NEAR(ind.tmd, scan.tau, 1e-3);
}

TEST(Indicators, BrakingStopsShortOfPedestrian) {
  // Stops after 10^2 / (2 * 5) = 10 m at t = 2 s, 5 m short of the pedestrian.
  const auto ego = agent(0, 0, 0, 10.0, -5.0);
  const auto ped = agent(15, 0, 0, 0.0);
  const auto ca = closest_approach(ego, ped, 5.0);
  EXPECT_NEAR(ca.distance, 5.0, 1e-9);
  EXPECT_NEAR(ca.tau, 2.0, 1e-6);
}

TEST(Indicators, AlignmentErrors) {
  const std::vector<AgentSample> one{agent(0, 0, 0, 1)};
  const std::vector<AgentSample> two{agent(0, 0, 0, 1), agent(0, 0, 0, 1)};
  const std::vector<AgentSample> none;
  EXPECT_THROW(compute_indicators(one, two, 5.0, 0.05, 1.0), AlignmentError);
  EXPECT_THROW(compute_indicators(none, none, 5.0, 0.05, 1.0), AlignmentError);
}

TEST(Indicators, ClosestApproachMatchesFineScan) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> pos(-30.0, 30.0), ang(-M_PI, M_PI), spd(0.0, 15.0),
      acc(-8.0, 2.0);
  int sharp = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto a = agent(pos(gen), pos(gen), ang(gen), spd(gen), acc(gen));
    const auto b = agent(pos(gen), pos(gen), ang(gen), spd(gen) * 0.2, 0.0);
    const auto ca = closest_approach(a, b, 5.0);
    const auto scan = oracle_scan(a, b, 5.0);
    // The grid can only overshoot the true minimum.
    EXPECT_LE(ca.distance, scan.distance + 1e-9);
    EXPECT_NEAR(ca.distance, scan.distance, 0.01);
    // Time of the minimum is only well defined when the minimum is sharp.
    const double d_lo = (oracle_position(b, std::max(0.0, scan.tau - 0.05)) -
                         oracle_position(a, std::max(0.0, scan.tau - 0.05))).norm();
    const double d_hi = (oracle_position(b, std::min(5.0, scan.tau + 0.05)) -
                         oracle_position(a, std::min(5.0, scan.tau + 0.05))).norm();
    if (std::min(d_lo, d_hi) - scan.distance > 1e-3 || scan.tau == 0.0 || scan.tau == 5.0) {
      EXPECT_NEAR(ca.tau, scan.tau, 0.01) << "case " << i;
      ++sharp;
    }
  }
  EXPECT_GT(sharp, 1000);
}

world::EpisodeRecord episode(const char* scenario, Mode mode, std::uint64_t i) {
  const auto spec = world::builtin_scenario(scenario);
  const RandomStream stream(episode_seed(11, mode_id(mode), i));
  return world::run_episode(spec, stochastic::sample_initial_scene(spec, stream), mode, stream);
}

TEST(Indicators, EpisodesMatchBruteForce) {
  int compared_tmd = 0;
  for (int i = 0; i < 200; ++i) {
    const char* name = world::kBuiltinScenarios[i % 3].data();
    const auto rec = episode(name, i % 2 ? Mode::v2i : Mode::single_vehicle, i);
    const double r = rec.contact_radii[0];
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : rec.frames) {
      const auto scan = oracle_scan(f.agents[rec.ego], f.agents[rec.pedestrian_agent(0)], 5.0, 0.001);
      best = std::min(best, scan.distance - r);
    }
    const auto& ind = rec.indicators[0];
    EXPECT_NEAR(ind.md, best, 0.01) << name << " " << i;
    const auto& f = rec.frames[ind.frame];
    const auto& ego = f.agents[rec.ego];
    const auto& ped = f.agents[rec.pedestrian_agent(0)];
    const auto scan = oracle_scan(ego, ped, 5.0, 0.001);
    EXPECT_NEAR(ind.md, scan.distance - r, 0.01);
    EXPECT_NEAR(ind.cs, (ego.velocity() - ped.velocity()).norm(), 1e-12);
    const double t0 = std::max(0.0, scan.tau - 0.05), t1 = std::min(5.0, scan.tau + 0.05);
    const double flank = std::min((oracle_position(ped, t0) - oracle_position(ego, t0)).norm(),
                                  (oracle_position(ped, t1) - oracle_position(ego, t1)).norm());
    if (flank - scan.distance > 1e-3) {
      EXPECT_NEAR(ind.tmd, scan.tau, 0.01) << name << " " << i;
      ++compared_tmd;
    }
    EXPECT_GE(ind.tmd, 0.0);
    EXPECT_GE(ind.cs, 0.0);
  }
  EXPECT_GT(compared_tmd, 50);
}

TEST(Labels, PartitionAndCollisionConsistency) {
  for (int i = 0; i < 150; ++i) {
    const auto rec = episode(world::kBuiltinScenarios[i % 3].data(), Mode::single_vehicle, i);
    ASSERT_EQ(rec.labels.size(), rec.pedestrians.size());
    if (rec.outcome == EventLabel::collision) {
      EXPECT_FALSE(rec.collisions.empty());
    } else {
      EXPECT_TRUE(rec.collisions.empty());
    }
    // Every collision label is backed by a contact event.
    if (rec.labels[0] == EventLabel::collision) {
      EXPECT_EQ(rec.collisions.front().pedestrian, 0);
    }
  }
}

TEST(Classify, Examples) {
  const ConflictIndicators far{30.0, 9.0, 0.0, 0};
  EXPECT_EQ(classify_event(far, true), EventLabel::collision);
  EXPECT_EQ(classify_event({3.0, 1.0, 0.5, 0}, false), EventLabel::conflict);
  EXPECT_EQ(classify_event({3.0, 2.0, 0.5, 0}, false), EventLabel::non_conflict);
  EXPECT_EQ(classify_event({3.0, 2.0, 1.5, 0}, false), EventLabel::conflict);
  EXPECT_EQ(classify_event({6.0, 0.5, 9.0, 0}, false), EventLabel::non_conflict);
  // Thresholds are strict.
  EXPECT_EQ(classify_event({3.0, 1.5, 1.0, 0}, false), EventLabel::non_conflict);
}

TEST(Classify, MonotoneInTmdAndCs) {
  const std::vector<double> tmds{0.0, 0.5, 1.0, 1.49, 1.5, 1.51, 2.0, 4.0};
  const std::vector<double> css{0.0, 0.5, 0.99, 1.0, 1.01, 3.0, 10.0};
  for (double md : {-1.0, 0.0, 2.0, 4.99, 5.0, 8.0}) {
    for (std::size_t i = 0; i < tmds.size(); ++i) {
      for (std::size_t j = 0; j < css.size(); ++j) {
        const auto here = classify_event({md, tmds[i], css[j], 0}, false);
        if (here != EventLabel::conflict) continue;
        // Lower TMD or higher CS stays a conflict.
        for (std::size_t k = 0; k <= i; ++k) {
          EXPECT_EQ(classify_event({md, tmds[k], css[j], 0}, false), EventLabel::conflict);
        }
        for (std::size_t k = j; k < css.size(); ++k) {
          EXPECT_EQ(classify_event({md, tmds[i], css[k], 0}, false), EventLabel::conflict);
        }
      }
    }
  }
}

TEST(Injury, Examples) {
  EXPECT_EQ(injury_probability(0.0, 50.0, 30.0), 0.0);
  EXPECT_EQ(injury_probability(0.0, 0.0, 0.0), 0.0);
  const double base = std::exp(-2.9893) / (1.0 + std::exp(-2.9893));
  EXPECT_NEAR(injury_probability(1.0, 0.0, 0.0), base, 1e-15);
  EXPECT_NEAR(injury_probability(1.0, 0.0, 0.0), 0.04786, 1e-4);  // quoted figure; exact 0.047912
  EXPECT_NEAR(injury_probability(1.0, 50.0, 30.0), logistic(1.1187), 1e-12);
  EXPECT_NEAR(injury_probability(1.0, 50.0, 30.0), 0.7537, 1e-4);
}

TEST(Injury, DomainErrors) {
  EXPECT_THROW(injury_probability(-0.1, 1, 1), DomainError);
  EXPECT_THROW(injury_probability(1.1, 1, 1), DomainError);
  EXPECT_THROW(injury_probability(0.5, -1, 1), DomainError);
  EXPECT_THROW(injury_probability(0.5, 1, -1), DomainError);
}

TEST(Injury, MonotoneAndLinearOnGrid) {
  for (double a = 0.0; a <= 90.0; a += 1.0) {
    for (double v = 0.0; v <= 120.0; v += 0.5) {
      const double p = injury_probability(1.0, v, a);
      if (v > 0.0) {
        EXPECT_LT(injury_probability(1.0, v - 0.5, a), p);
      }
      if (a > 0.0) {
        EXPECT_LT(injury_probability(1.0, v, a - 1.0), p);
      }
      for (double pc : {0.1, 0.37, 0.9}) {
        EXPECT_NEAR(injury_probability(pc, v, a), pc * p, 1e-15);
      }
    }
  }
}

TEST(Injury, SpeedUnitsAndSurface) {
  EXPECT_DOUBLE_EQ(injury_speed(10.0, SpeedUnit::kmh), 36.0);
  EXPECT_DOUBLE_EQ(injury_speed(10.0, SpeedUnit::ms), 10.0);
  const auto surface = injury_surface(0.5);
  ASSERT_EQ(surface.size(), 17u * 8u);
  EXPECT_EQ(surface.front().v, 0.0);
  EXPECT_EQ(surface.front().age, 10.0);
  EXPECT_EQ(surface.back().v, 80.0);
  EXPECT_EQ(surface.back().age, 80.0);
  for (const auto& p : surface) {
    EXPECT_NEAR(p.p_injury, 0.5 * logistic(-2.9893 + 0.0013 * p.v * p.v + 0.0286 * p.age), 1e-15);
  }
}

TEST(NearestRank, Examples) {
  const std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(nearest_rank(xs, 0.10), 1.0);
  EXPECT_EQ(nearest_rank(xs, 0.50), 5.0);
  EXPECT_EQ(nearest_rank(xs, 0.90), 9.0);
  EXPECT_EQ(nearest_rank(xs, 0.91), 10.0);
  EXPECT_EQ(nearest_rank(xs, 0.0), 1.0);
  EXPECT_EQ(nearest_rank(xs, 1.0), 10.0);
  const std::vector<double> three{2.0, 7.0, 11.0};
  EXPECT_EQ(nearest_rank(three, 0.5), 7.0);
  EXPECT_FALSE(nearest_rank(std::vector<double>{}, 0.5).has_value());
}

world::EpisodeRecord two_agent_record(double gap) {
  world::EpisodeRecord rec;
  rec.num_vehicles = 1;
  rec.ego = 0;
  rec.dt = 0.05;
  rec.pedestrians.resize(1);
  rec.contact_radii = {1.2};
  for (int f = 0; f < 3; ++f) {
    world::FrameRecord fr;
    fr.frame = f;
    fr.time = f * 0.05;
    fr.agents = {agent(0.5 * f, 0, 0, 10), agent(gap * 0.6, gap * 0.8, 0, 0)};
    rec.frames.push_back(fr);
  }
  return rec;
}

TEST(FirstDetection, Examples) {
  auto rec = two_agent_record(25.0);
  EXPECT_FALSE(first_detection_distance(rec).has_value());
  perception::Detection d;
  d.frame = 0;
  rec.detections.push_back(d);
  EXPECT_NEAR(*first_detection_distance(rec), 25.0, 1e-12);
  // The earliest frame wins regardless of storage order.
  rec.detections.front().frame = 2;
  d.frame = 1;
  rec.detections.push_back(d);
  const Vec2 ego(0.5, 0.0), ped(15.0, 20.0);
  EXPECT_NEAR(*first_detection_distance(rec), (ped - ego).norm(), 1e-12);
}

EpisodeSummary collided(double v, double age) {
  return {EventLabel::collision, world::CollisionEvent{10, 0, v, age}, 12.0};
}

TEST(Aggregate, AllNonConflict) {
  const std::vector<EpisodeSummary> eps(5, EpisodeSummary{});
  const auto r = aggregate(eps, "x", Mode::v2i);
  EXPECT_EQ(r.collision_rate, 0.0);
  EXPECT_EQ(r.conflict_rate, 0.0);
  EXPECT_EQ(r.mean_injury, 0.0);
  EXPECT_FALSE(r.fdd_p50.has_value());
  EXPECT_EQ(r.detected, 0u);
}

TEST(Aggregate, FourEpisodesOneCollision) {
  const double v_ms = 10.0, age = 40.0;
  std::vector<EpisodeSummary> eps(3, EpisodeSummary{});
  eps.push_back(collided(v_ms, age));
  const auto r = aggregate(eps, "x", Mode::single_vehicle);
  EXPECT_EQ(r.collision_rate, 0.25);
  const double v = v_ms * 3.6;
  EXPECT_NEAR(r.mean_injury, 0.25 * logistic(-2.9893 + 0.0013 * v * v + 0.0286 * age), 1e-15);
  EXPECT_EQ(r.collisions, 1u);
  EXPECT_EQ(r.fdd_p50, 12.0);
  EXPECT_EQ(r.injury_surface.size(), 17u * 8u);
  EXPECT_DOUBLE_EQ(r.injury_surface[0].p_injury, injury_probability(0.25, 0.0, 10.0));
}

TEST(Aggregate, RatesAreCountsAndSumToAtMostOne) {
  std::vector<EpisodeSummary> eps;
  for (int i = 0; i < 7; ++i) eps.push_back(collided(5.0 + i, 20.0 + i));
  for (int i = 0; i < 5; ++i) eps.push_back({EventLabel::conflict, std::nullopt, 3.0 + i});
  for (int i = 0; i < 9; ++i) eps.push_back({});
  const auto r = aggregate(eps, "x", Mode::single_vehicle);
  EXPECT_EQ(r.collision_rate, 7.0 / 21.0);
  EXPECT_EQ(r.conflict_rate, 5.0 / 21.0);
  EXPECT_LE(r.collision_rate + r.conflict_rate, 1.0);
  EXPECT_EQ(r.detected, 12u);
  EXPECT_THROW(aggregate(std::vector<EpisodeSummary>{}, "x", Mode::v2i), AggregationError);
}

TEST(Labels, StringRoundTrip) {
  for (auto l : {EventLabel::non_conflict, EventLabel::conflict, EventLabel::collision}) {
    EXPECT_EQ(event_label_from_string(to_string(l)), l);
  }
  EXPECT_EQ(speed_unit_from_string(to_string(SpeedUnit::kmh)), SpeedUnit::kmh);
  EXPECT_EQ(speed_unit_from_string(to_string(SpeedUnit::ms)), SpeedUnit::ms);
}

}  // namespace
}  // namespace pedsafe::safety
