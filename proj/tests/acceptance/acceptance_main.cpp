// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <fmt/core.h>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pedsafe/config.hpp"
#include "pedsafe/distributions.hpp"
#include "pedsafe/episode.hpp"
#include "pedsafe/experiment.hpp"
#include "pedsafe/geometry.hpp"
#include "pedsafe/initial_scene.hpp"
#include "pedsafe/perception.hpp"
#include "pedsafe/random.hpp"
#include "pedsafe/safety.hpp"
#include "pedsafe/world.hpp"

namespace fs = std::filesystem;
using namespace pedsafe;

namespace {

// Tolerances and sizes, pinned.
constexpr double kGeomRelTol = 1e-9;
constexpr int kGeomTriples = 10'000;
constexpr double kInjuryLowExpected = 0.04786;
constexpr double kInjuryLowTol = 1e-4;
constexpr double kInjuryHighExpected = 0.7537;
constexpr double kInjuryHighTol = 1e-3;
constexpr std::uint64_t kEpisodes = 1000;
constexpr std::uint64_t kMasterSeed = 0;
constexpr double kWilsonZ = 1.959963984540054;
constexpr double kDetectionTarget = 13.0;
constexpr int kFitSamples = 30'000;
constexpr double kFitRelTol = 0.02;
constexpr int kOracleEpisodes = 200;
constexpr double kOracleStep = 0.001;
constexpr double kMdTol = 0.01;
constexpr double kTmdTol = 0.01;
constexpr std::uint64_t kDeterminismEpisodes = 200;
constexpr int kSupersetEpisodes = 500;

int failures = 0;

void verdict(const char* id, bool ok, const std::string& detail) {
  fmt::print("{} {}: {}\n", ok ? "PASS" : "FAIL", id, detail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "pedsafe_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------- AC-1

Eigen::Matrix3d random_rotation(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(gen), n(gen), n(gen), n(gen));
  q.normalize();
  return q.toRotationMatrix();
}

void ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> xy(-40.0, 40.0), z(0.5, 80.0), trans(-20.0, 20.0);
  std::uniform_real_distribution<double> fov(30.0, 140.0);
  std::uniform_int_distribution<int> w(320, 2560), h(240, 1440);
  double worst_round = 0.0, worst_chain = 0.0;
  int done = 0;
  while (done < kGeomTriples) {
    const auto k_i = geometry::intrinsics_from_spec(w(gen), h(gen), fov(gen));
    const auto k_v = geometry::intrinsics_from_spec(w(gen), h(gen), fov(gen));
    const geometry::CameraPoint p{xy(gen), xy(gen), z(gen)};
    const Eigen::Matrix3d r_i = random_rotation(gen), r_v = random_rotation(gen);
    const Eigen::Vector3d c_i(trans(gen), trans(gen), trans(gen)), c_v(trans(gen), trans(gen), trans(gen));
    const auto t_i = geometry::RigidTransform::from_rotation_translation(r_i, c_i);
    const auto t_v = geometry::RigidTransform::from_rotation_translation(r_v, c_v);

    // Oracle: homogeneous 4x4 chain with a general inverse and explicit pinhole.
    Eigen::Matrix4d m_i = Eigen::Matrix4d::Identity(), m_v = Eigen::Matrix4d::Identity();
    m_i.topLeftCorner<3, 3>() = r_i;
    m_i.topRightCorner<3, 1>() = c_i;
    m_v.topLeftCorner<3, 3>() = r_v;
    m_v.topRightCorner<3, 1>() = c_v;
    const Eigen::Vector4d hv = m_v * m_i.inverse() * Eigen::Vector4d(p.x, p.y, p.z, 1.0);
    const Eigen::Vector3d pv = hv.head<3>() / hv.w();
    if (pv.z() < 0.5) continue;  // behind or grazing the second camera
    const double fx_v = k_v.width / (2.0 * std::tan(k_v.fov_deg * M_PI / 360.0));
    const Eigen::Vector2d oracle(fx_v * pv.x() / pv.z() + k_v.width / 2.0,
                                 fx_v * pv.y() / pv.z() + k_v.height / 2.0);

    const auto px = geometry::project(p, k_i);
    const auto back = geometry::backproject(px, p.z, k_i);
    worst_round = std::max(worst_round, (back.vec() - p.vec()).norm() / p.vec().norm());

    const auto chained = geometry::transfer_pixel(px, p.z, k_i, t_i, t_v, k_v);
    const double err = (Eigen::Vector2d(chained.u, chained.v) - oracle).norm() / std::max(1.0, oracle.norm());
    worst_chain = std::max(worst_chain, err);
    ++done;
  }
  const double secs = seconds_since(t0);
  verdict("AC-1", worst_round <= kGeomRelTol && worst_chain <= kGeomRelTol && secs < 1.0,
          fmt::format("{} triples, worst round-trip rel {:.2e}, worst chain rel {:.2e}, {:.3f} s",
                      done, worst_round, worst_chain, secs));
}

// ---------------------------------------------------------------- AC-2

void ac2() {
  const auto t0 = std::chrono::steady_clock::now();
  const double low = safety::injury_probability(1.0, 0.0, 0.0);
  const double high = safety::injury_probability(1.0, 50.0, 30.0);
  bool monotone = true;
  for (int a = 10; a <= 80; a += 10) {
    for (int v = 5; v <= 80; v += 5) {
      if (!(safety::injury_probability(1.0, v, a) > safety::injury_probability(1.0, v - 5, a))) monotone = false;
    }
  }
  for (int v = 0; v <= 80; v += 5) {
    for (int a = 20; a <= 80; a += 10) {
      if (!(safety::injury_probability(1.0, v, a) > safety::injury_probability(1.0, v, a - 10))) monotone = false;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = std::abs(low - kInjuryLowExpected) <= kInjuryLowTol &&
                  std::abs(high - kInjuryHighExpected) <= kInjuryHighTol && monotone && secs < 1.0;
  verdict("AC-2", ok,
          fmt::format("P_I(1,0,0)={:.6f} P_I(1,50,30)={:.6f} monotone={} {:.3f} s", low, high, monotone, secs));
}

// ------------------------------------------------------- AC-3, AC-4, AC-5

struct Wilson {
  double lo, hi;
};

Wilson wilson(std::size_t k, std::size_t n) {
  const double p = static_cast<double>(k) / n, z2 = kWilsonZ * kWilsonZ;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {centre - half, centre + half};
}

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{:.2f}", *v) : "n/a"; }

using Reports = std::map<std::string, std::pair<safety::SafetyReport, safety::SafetyReport>>;

Reports full_runs() {
  Reports out;
  for (auto name : world::kBuiltinScenarios) {
    auto cfg = harness::default_config(name);
    cfg.episodes = kEpisodes;
    cfg.master_seed = kMasterSeed;
    cfg.write_trajectories = false;
    cfg.output_dir = scratch(std::string("full_") + std::string(name)).string();
    const auto result = harness::run_experiment(cfg);
    out[std::string(name)] = {result.reports.at(0), result.reports.at(1)};
  }
  return out;
}

void ac3(const Reports& reports, double secs) {
  bool ok = true;
  std::string detail;
  for (const auto& [name, pair] : reports) {
    const auto& [sv, v2i] = pair;
    const bool better = v2i.collision_rate < sv.collision_rate && v2i.conflict_rate < sv.conflict_rate &&
                        v2i.mean_injury < sv.mean_injury;
    ok = ok && better;
    detail += fmt::format("{} coll {:.3f}->{:.3f} conf {:.3f}->{:.3f} inj {:.4f}->{:.4f}; ", name,
                          sv.collision_rate, v2i.collision_rate, sv.conflict_rate, v2i.conflict_rate,
                          sv.mean_injury, v2i.mean_injury);
  }
  verdict("AC-3", ok, detail + fmt::format("{:.1f} s", secs));
}

void ac4(const Reports& reports) {
  const auto& jay = reports.at("jaywalking").first;
  const auto& cross = reports.at("crossing").first;
  const auto cj = wilson(jay.collisions, jay.episodes);
  const auto cc = wilson(cross.collisions, cross.episodes);
  const bool ok = jay.collision_rate > cross.collision_rate && cj.lo > cc.hi;
  verdict("AC-4", ok,
          fmt::format("jaywalking {}/{} [{:.4f},{:.4f}] vs crossing {}/{} [{:.4f},{:.4f}]", jay.collisions,
                      jay.episodes, cj.lo, cj.hi, cross.collisions, cross.episodes, cc.lo, cc.hi));
}

void ac5(const Reports& reports) {
  const auto& [sv, v2i] = reports.at("jaywalking");
  const bool ok = v2i.fdd_p10 && sv.fdd_p50 && *v2i.fdd_p10 > *sv.fdd_p50;
  const bool target = v2i.fdd_p10 && sv.fdd_p90 && *v2i.fdd_p10 > kDetectionTarget &&
                      *sv.fdd_p90 < kDetectionTarget;
  verdict("AC-5", ok,
          fmt::format("v2i p10 {} > sv p50 {}; 13 m target (v2i p10 > 13, sv p90 < 13) {} (sv p90 {})",
                      opt(v2i.fdd_p10), opt(sv.fdd_p50), target ? "met" : "not met", opt(sv.fdd_p90)));
}

// ---------------------------------------------------------------- AC-6

void ac6() {
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(6);
  std::vector<double> h(kFitSamples), s1(kFitSamples), s2(kFitSamples);
  for (int i = 0; i < kFitSamples; ++i) {
    h[i] = stochastic::sample_headway(stochastic::kHeadway, rng);
    s1[i] = stochastic::sample_speed(stochastic::kSpeedNonIntersection, rng);
    s2[i] = stochastic::sample_speed(stochastic::kSpeedIntersection, rng);
  }
  const auto fe = stochastic::fit_exponential(h);
  const auto f1 = stochastic::fit_lognormal(s1);
  const auto f2 = stochastic::fit_lognormal(s2);
  const auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
  const double worst = std::max({rel(fe.lambda, stochastic::kHeadway.lambda),
                                 rel(f1.mu, stochastic::kSpeedNonIntersection.mu),
                                 rel(f1.sigma, stochastic::kSpeedNonIntersection.sigma),
                                 rel(f2.mu, stochastic::kSpeedIntersection.mu),
                                 rel(f2.sigma, stochastic::kSpeedIntersection.sigma)});
  const double secs = seconds_since(t0);
  verdict("AC-6", worst <= kFitRelTol && secs < 5.0,
          fmt::format("lambda {:.4f}, (mu,sigma) ({:.4f},{:.4f}) and ({:.4f},{:.4f}); worst rel {:.4f}, {:.2f} s",
                      fe.lambda, f1.mu, f1.sigma, f2.mu, f2.sigma, worst, secs));
}

// ---------------------------------------------------------------- AC-7

// Independent kinematics: constant acceleration along the heading, held at rest once stopped.
Vec2 oracle_position(const world::AgentSample& a, double t) {
  const double t_stop = a.accel < 0.0 ? a.speed / -a.accel : std::numeric_limits<double>::infinity();
  const double tt = std::min(t, t_stop);
  return a.position() + Vec2(std::cos(a.heading), std::sin(a.heading)) * (a.speed * tt + 0.5 * a.accel * tt * tt);
}

std::pair<double, double> oracle_scan(const world::AgentSample& a, const world::AgentSample& b, double horizon) {
  double best = std::numeric_limits<double>::infinity(), tau = 0.0;
  const int n = static_cast<int>(std::round(horizon / kOracleStep));
  for (int i = 0; i <= n; ++i) {
    const double t = i * kOracleStep;
    const double d = (oracle_position(b, t) - oracle_position(a, t)).norm();
    if (d < best) {
      best = d;
      tau = t;
    }
  }
  return {best, tau};
}

void ac7() {
  const safety::SafetyParams params;
  double worst_md = 0.0, worst_tmd = 0.0;
  int tmd_compared = 0;
  for (int i = 0; i < kOracleEpisodes; ++i) {
    const auto name = world::kBuiltinScenarios[i % 3];
    const auto spec = world::builtin_scenario(name);
    const RandomStream stream(episode_seed(77, 0, static_cast<std::uint64_t>(i)));
    const auto rec = world::run_episode(spec, stochastic::sample_initial_scene(spec, stream),
                                        i % 2 ? Mode::v2i : Mode::single_vehicle, stream, params);
    const double r = rec.contact_radii[0];
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : rec.frames) {
      best = std::min(best, oracle_scan(f.agents[rec.ego], f.agents[rec.pedestrian_agent(0)], params.horizon).first - r);
    }
    const auto& ind = rec.indicators[0];
    worst_md = std::max(worst_md, std::abs(ind.md - best));

    // TMD is only well defined when the minimum is sharp rather than a plateau.
    const auto& f = rec.frames[ind.frame];
    const auto& ego = f.agents[rec.ego];
    const auto& ped = f.agents[rec.pedestrian_agent(0)];
    const auto [d, tau] = oracle_scan(ego, ped, params.horizon);
    const double t0 = std::max(0.0, tau - 0.05), t1 = std::min(params.horizon, tau + 0.05);
    const double flank = std::min((oracle_position(ped, t0) - oracle_position(ego, t0)).norm(),
                                  (oracle_position(ped, t1) - oracle_position(ego, t1)).norm());
    if (flank - d > 1e-3) {
      worst_tmd = std::max(worst_tmd, std::abs(ind.tmd - tau));
      ++tmd_compared;
    }
  }
  verdict("AC-7", worst_md <= kMdTol && worst_tmd <= kTmdTol,
          fmt::format("{} episodes, worst |MD err| {:.5f} m, worst |TMD err| {:.4f} s over {} sharp minima",
                      kOracleEpisodes, worst_md, worst_tmd, tmd_compared));
}

// ---------------------------------------------------------------- AC-8

void ac8() {
  bool same = true;
  std::size_t files = 0;
  for (auto name : world::kBuiltinScenarios) {
    std::vector<fs::path> dirs;
    for (unsigned workers : {1u, 1u, 4u}) {
      auto cfg = harness::default_config(name);
      cfg.episodes = kDeterminismEpisodes;
      cfg.master_seed = kMasterSeed;
      cfg.workers = workers;
      cfg.output_dir = scratch(fmt::format("det_{}_{}", name, dirs.size())).string();
      harness::run_experiment(cfg);
      dirs.emplace_back(cfg.output_dir);
    }
    for (auto mode : {Mode::single_vehicle, Mode::v2i}) {
      const auto ref = harness::mode_outputs(dirs[0], mode);
      for (std::size_t k = 1; k < dirs.size(); ++k) {
        const auto other = harness::mode_outputs(dirs[k], mode);
        same = same && slurp(ref.records) == slurp(other.records) &&
               slurp(ref.report_csv) == slurp(other.report_csv) &&
               slurp(ref.report_json) == slurp(other.report_json);
        files += 3;
      }
    }
  }
  verdict("AC-8", same,
          fmt::format("{} file pairs compared (repeat run and 4 workers vs 1, {} episodes per mode)", files,
                      kDeterminismEpisodes));
}

// ---------------------------------------------------------------- AC-9

void ac9() {
  int frame_violations = 0, episode_violations = 0;
  std::size_t sv_events = 0, v2i_events = 0;
  for (auto name : world::kBuiltinScenarios) {
    const auto spec = world::builtin_scenario(name);
    for (int i = 0; i < kSupersetEpisodes; ++i) {
      const RandomStream stream(episode_seed(kMasterSeed, 0, static_cast<std::uint64_t>(i)));
      const auto theta = stochastic::sample_initial_scene(spec, stream);

      // Frame-level: drive the single-vehicle world and perceive it both ways.
      auto w = world::initial_world(spec, theta);
      auto sv_state = perception::PerceptionState::open(stream);
      auto v2i_state = perception::PerceptionState::open(stream);
      std::set<std::pair<int, int>> sv_set, v2i_set;
      for (int f = 0; f < spec.frames; ++f) {
        const auto sv = perception::perceive(w, Mode::single_vehicle, spec, sv_state);
        const auto v2i = perception::perceive(w, Mode::v2i, spec, v2i_state);
        for (const auto& d : sv) sv_set.emplace(d.frame, d.pedestrian);
        for (const auto& d : v2i) v2i_set.emplace(d.frame, d.pedestrian);
        if (world::all_arrived(w)) break;
        w = world::step(w, spec, sv, spec.dt);
      }
      sv_events += sv_set.size();
      v2i_events += v2i_set.size();
      if (!std::includes(v2i_set.begin(), v2i_set.end(), sv_set.begin(), sv_set.end())) ++frame_violations;

      // Episode-level: every pedestrian the single vehicle sees, v2i sees no later.
      const auto rec_sv = world::run_episode(spec, theta, Mode::single_vehicle, stream);
      const auto rec_v2i = world::run_episode(spec, theta, Mode::v2i, stream);
      std::map<int, int> first_sv, first_v2i;
      for (const auto& d : rec_sv.detections) first_sv.try_emplace(d.pedestrian, d.frame);
      for (const auto& d : rec_v2i.detections) first_v2i.try_emplace(d.pedestrian, d.frame);
      for (const auto& [ped, frame] : first_sv) {
        const auto it = first_v2i.find(ped);
        if (it == first_v2i.end() || it->second > frame) {
          ++episode_violations;
          break;
        }
      }
    }
  }
  verdict("AC-9", frame_violations == 0 && episode_violations == 0,
          fmt::format("{} episodes per scenario: frame-level violations {}, episode-level violations {} "
                      "({} single-vehicle vs {} v2i (frame, pedestrian) events)",
                      kSupersetEpisodes, frame_violations, episode_violations, sv_events, v2i_events));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> steps{
      {"AC-1", ac1}, {"AC-2", ac2}, {"AC-6", ac6}, {"AC-7", ac7}, {"AC-9", ac9}, {"AC-8", ac8}};
  for (const auto& [id, fn] : steps) {
    try {
      fn();
    } catch (const std::exception& e) {
      verdict(id, false, fmt::format("threw: {}", e.what()));
    }
  }
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = full_runs();
    const double secs = seconds_since(t0);
    ac3(reports, secs);
    ac4(reports);
    ac5(reports);
  } catch (const std::exception& e) {
    for (const char* id : {"AC-3", "AC-4", "AC-5"}) verdict(id, false, fmt::format("threw: {}", e.what()));
  }
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
