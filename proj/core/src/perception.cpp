#include "pedsafe/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pedsafe/error.hpp"

namespace pedsafe::perception {

using geometry::BoundingBox;
using geometry::CameraPoint;
using geometry::PixelPoint;

namespace {

bool in_image(const PixelPoint& p, const geometry::CameraIntrinsics& k) {
  return p.u >= 0.0 && p.u <= k.width && p.v >= 0.0 && p.v <= k.height;
}

Vec3 to_camera(const SensorPose& pose, const Vec3& world) {
  return pose.world_to_camera.apply(world);
}

Vec2 world_xy(const SensorPose& pose, const CameraPoint& p) {
  const Vec3 w = pose.world_to_camera.inverse().apply(p.vec());
  return {w.x(), w.y()};
}

// Enter/exit parameters of the line a + t (b - a) through the prism.
std::optional<std::pair<double, double>> clip(const Vec3& a, const Vec3& b, const Obstacle& o) {
  double t_in = -std::numeric_limits<double>::infinity();
  double t_out = std::numeric_limits<double>::infinity();
  const Vec3 d = b - a;
  auto half_space = [&](double f0, double df) {
    // keeps f0 + t df <= 0
    if (df == 0.0) return f0 <= 0.0;
    const double t = -f0 / df;
    if (df < 0.0) {
      t_in = std::max(t_in, t);
    } else {
      t_out = std::min(t_out, t);
    }
    return t_in <= t_out;
  };
  if (!half_space(-a.z(), -d.z())) return std::nullopt;
  if (!half_space(a.z() - o.height, d.z())) return std::nullopt;
  const std::size_t n = o.footprint.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = o.footprint[i];
    const Vec2& q = o.footprint[(i + 1) % n];
    const Vec2 normal(q.y() - p.y(), p.x() - q.x());
    const double f0 = normal.dot(Vec2(a.x(), a.y()) - p);
    const double df = normal.dot(Vec2(d.x(), d.y()));
    if (!half_space(f0, df)) return std::nullopt;
  }
  return std::make_pair(t_in, t_out);
}

bool blocked(const Vec3& a, const Vec3& b, std::span<const Obstacle> obstacles) {
  for (const auto& o : obstacles) {
    const auto hit = clip(a, b, o);
    if (hit && std::max(hit->first, 0.0) < std::min(hit->second, 1.0)) return true;
  }
  return false;
}

}  // namespace

std::vector<Obstacle> collect_obstacles(const world::WorldState& w, const world::RoadLayout& layout,
                                        int carrier) {
  std::vector<Obstacle> out;
  for (std::size_t i = 0; i < w.vehicles.size(); ++i) {
    if (static_cast<int>(i) == carrier) continue;
    const auto& v = w.vehicles[i];
    const auto fp = world::footprint(v);
    out.push_back({{fp.begin(), fp.end()}, v.extent.height, v.color});
  }
  for (const auto& s : layout.static_objects) out.push_back({s.footprint, s.height, s.color});
  return out;
}

SensorPose roadside_pose(const SensorSpec& spec) {
  SensorPose pose;
  pose.spec = &spec;
  pose.world_to_camera = spec.mount;
  pose.origin = spec.mount.inverse().translation_part();
  return pose;
}

SensorPose onboard_pose(const SensorSpec& spec, const world::VehicleState& carrier) {
  SensorPose pose;
  pose.spec = &spec;
  const auto b2w = world::body_to_world(carrier);
  pose.world_to_camera = spec.mount * b2w.inverse();
  pose.origin = pose.world_to_camera.inverse().translation_part();
  return pose;
}

std::array<Vec3, 5> sample_points(const world::PedestrianState& ped, const Vec3& camera) {
  const Vec2& c = ped.position;
  const double h = ped.height;
  Vec2 sight = c - Vec2(camera.x(), camera.y());
  sight = sight.norm() > 0.0 ? Vec2(sight.normalized()) : Vec2(1.0, 0.0);
  const Vec2 across = Vec2(-sight.y(), sight.x()) * 0.2;
  return {Vec3(c.x(), c.y(), h - 0.1),
          Vec3(c.x(), c.y(), 0.55 * h),
          Vec3(c.x() + across.x(), c.y() + across.y(), 0.8 * h),
          Vec3(c.x() - across.x(), c.y() - across.y(), 0.8 * h),
          Vec3(c.x(), c.y(), 0.05)};
}

std::optional<double> segment_entry(const Vec3& a, const Vec3& b, const Obstacle& o) {
  const auto hit = clip(a, b, o);
  if (!hit) return std::nullopt;
  const double lo = std::max(hit->first, 0.0);
  const double hi = std::min(hit->second, 1.0);
  if (lo < hi && lo < 1.0) return lo;
  return std::nullopt;
}

double visible_fraction(const SensorPose& pose, const world::PedestrianState& ped,
                        std::span<const Obstacle> obstacles) {
  const auto& spec = *pose.spec;
  int seen = 0;
  for (const auto& q : sample_points(ped, pose.origin)) {
    const Vec3 pc = to_camera(pose, q);
    if (!(pc.z() > 0.0)) continue;
    if (!in_image(geometry::project(CameraPoint::from(pc), spec.intrinsics), spec.intrinsics)) {
      continue;
    }
    if ((q - pose.origin).norm() > spec.max_range) continue;
    if (blocked(pose.origin, q, obstacles)) continue;
    ++seen;
  }
  return seen / 5.0;
}

std::optional<Backdrop> find_backdrop(const SensorPose& pose, const world::PedestrianState& ped,
                                      std::span<const Obstacle> obstacles) {
  const Vec3 torso(ped.position.x(), ped.position.y(), 0.55 * ped.height);
  const Vec3 dir = torso - pose.origin;
  const double to_ped = dir.norm();
  const double reach = pose.spec->max_range;
  if (!(to_ped > 0.0) || to_ped >= reach) return std::nullopt;
  const Vec3 far = pose.origin + dir * (reach / to_ped);
  const double t_ped = to_ped / reach;

  std::optional<Backdrop> best;
  double best_t = std::numeric_limits<double>::infinity();
  for (const auto& o : obstacles) {
    const auto hit = clip(pose.origin, far, o);
    if (!hit) continue;
    const double t = std::max(hit->first, t_ped);
    if (!(t < std::min(hit->second, 1.0)) || t >= best_t) continue;
    best_t = t;
    const Vec3 p = pose.origin + (far - pose.origin) * t;
    best = Backdrop{(t - t_ped) * reach, to_camera(pose, p).z(), o.color};
  }
  return best;
}

SensorChannel SensorChannel::open(RandomStream rng) {
  SensorChannel c;
  c.rng = rng;
  c.blend_draw = c.rng.uniform();
  return c;
}

std::optional<BoundingBox> projected_bbox(const SensorPose& pose,
                                          const world::PedestrianState& ped) {
  const auto& k = pose.spec->intrinsics;
  double u0 = std::numeric_limits<double>::infinity();
  double v0 = u0;
  double u1 = -u0;
  double v1 = -u0;
  bool any = false;
  for (double dx : {-0.25, 0.25}) {
    for (double dy : {-0.25, 0.25}) {
      for (double z : {0.0, ped.height}) {
        const Vec3 pc = to_camera(pose, Vec3(ped.position.x() + dx, ped.position.y() + dy, z));
        if (!(pc.z() > 0.0)) continue;
        const auto px = geometry::project(CameraPoint::from(pc), k);
        u0 = std::min(u0, px.u);
        v0 = std::min(v0, px.v);
        u1 = std::max(u1, px.u);
        v1 = std::max(v1, px.v);
        any = true;
      }
    }
  }
  if (!any) return std::nullopt;
  const double w = k.width;
  const double h = k.height;
  u0 = std::clamp(u0, 0.0, w);
  u1 = std::clamp(u1, 0.0, w);
  v0 = std::clamp(v0, 0.0, h);
  v1 = std::clamp(v1, 0.0, h);
  return BoundingBox::make(u0, v0, u1, v1);
}

geometry::DepthPatch make_depth_patch(const BoundingBox& bbox, double ped_depth,
                                      std::optional<double> backdrop_depth) {
  geometry::DepthPatch patch;
  patch.region = bbox;
  patch.cols = kPatchCols;
  patch.rows = kPatchRows;
  patch.depths.reserve(kPatchCols * kPatchRows);
  for (int r = 0; r < kPatchRows; ++r) {
    for (int c = 0; c < kPatchCols; ++c) {
      const bool back = backdrop_depth && (r + c) % 10 < 3;
      patch.depths.push_back(back ? *backdrop_depth : ped_depth);
    }
  }
  return patch;
}

double quantize_depth(const SensorSpec& spec, double depth) {
  if (!spec.depth_quantization) return depth;
  const double step = spec.max_range / 256.0;
  return std::max(step, std::round(depth / step) * step);
}

std::optional<Detection> try_detect(const SensorPose& pose, Source source, int pedestrian,
                                    const world::PedestrianState& ped,
                                    std::span<const Obstacle> obstacles, SensorChannel& channel,
                                    int frame) {
  const auto& spec = *pose.spec;
  if (visible_fraction(pose, ped, obstacles) < spec.visibility_threshold) return std::nullopt;

  const auto backdrop = find_backdrop(pose, ped, obstacles);
  if (backdrop && backdrop->gap <= kBlendMaxGap &&
      color_distance(backdrop->color, ped.body_color) < spec.blend_delta &&
      !(channel.blend_draw < spec.blend_detect_prob)) {
    return std::nullopt;
  }

  const Vec3 torso(ped.position.x(), ped.position.y(), 0.55 * ped.height);
  const Vec3 torso_cam = to_camera(pose, torso);
  if (!(torso_cam.z() > 0.0)) return std::nullopt;
  const auto bbox = projected_bbox(pose, ped);
  if (!bbox) return std::nullopt;

  std::optional<double> back_depth;
  if (backdrop && backdrop->depth > 0.0) back_depth = quantize_depth(spec, backdrop->depth);
  const auto patch = make_depth_patch(*bbox, quantize_depth(spec, torso_cam.z()), back_depth);

  Detection d;
  d.frame = frame;
  d.source = source;
  d.pedestrian = pedestrian;
  d.bbox = *bbox;
  d.anchor = geometry::project(CameraPoint::from(torso_cam), spec.intrinsics);
  d.est_distance = geometry::pedestrian_distance_from_bbox(*bbox, patch, spec.kmeans_k, channel.rng);
  d.est_position_world =
      world_xy(pose, geometry::backproject(d.anchor, d.est_distance, spec.intrinsics));
  d.truth_position_world = ped.position;
  return d;
}

Detection fuse_v2i(const Detection& roadside, const geometry::RigidTransform& t_i,
                   const geometry::CameraIntrinsics& k_i, const geometry::RigidTransform& t_v,
                   const geometry::CameraIntrinsics& k_v) {
  Detection out = roadside;
  const auto& b = roadside.bbox;
  const PixelPoint corners[4] = {
      {b.u_min, b.v_min}, {b.u_max, b.v_min}, {b.u_min, b.v_max}, {b.u_max, b.v_max}};

  double u0 = std::numeric_limits<double>::infinity();
  double v0 = u0;
  double u1 = -u0;
  double v1 = -u0;
  bool behind = false;
  for (const auto& c : corners) {
    const auto pv = geometry::transfer_point(geometry::backproject(c, roadside.est_distance, k_i),
                                             t_i, t_v);
    if (!(pv.z > 0.0)) {
      behind = true;
      continue;
    }
    const auto px = geometry::project(pv, k_v);
    u0 = std::min(u0, px.u);
    v0 = std::min(v0, px.v);
    u1 = std::max(u1, px.u);
    v1 = std::max(v1, px.v);
  }

  const auto anchor_v = geometry::transfer_point(
      geometry::backproject(roadside.anchor, roadside.est_distance, k_i), t_i, t_v);
  if (!(anchor_v.z > 0.0)) behind = true;

  out.out_of_frame = behind;
  if (behind) {
    out.bbox = BoundingBox{};
    out.anchor = PixelPoint{};
    out.est_distance = anchor_v.vec().norm();
  } else {
    out.bbox = BoundingBox::make(u0, v0, u1, v1);
    out.anchor = geometry::project(anchor_v, k_v);
    out.est_distance = anchor_v.z;
  }
  const Vec3 w = t_v.inverse().apply(anchor_v.vec());
  out.est_position_world = Vec2(w.x(), w.y());
  return out;
}

PerceptionState PerceptionState::open(const RandomStream& episode) {
  return {SensorChannel::open(episode.substream(stream_key::kOnboardSensor)),
          SensorChannel::open(episode.substream(stream_key::kRoadsideSensor))};
}

std::vector<Detection> perceive(const world::WorldState& w, Mode mode,
                                const world::ScenarioConfig& spec, PerceptionState& state) {
  std::vector<Detection> out;
  if (w.ego < 0) return out;
  const auto& sensors = spec.sensors;
  const auto& ego = w.vehicles[w.ego];

  if (sensors.onboard.enabled) {
    const auto pose = onboard_pose(sensors.onboard, ego);
    const auto obstacles = collect_obstacles(w, spec.layout, w.ego);
    for (std::size_t j = 0; j < w.pedestrians.size(); ++j) {
      if (auto d = try_detect(pose, Source::onboard, static_cast<int>(j), w.pedestrians[j],
                              obstacles, state.onboard, w.frame)) {
        out.push_back(*d);
      }
    }
  }

  if (mode == Mode::v2i && sensors.roadside.enabled) {
    const auto pose = roadside_pose(sensors.roadside);
    const auto obstacles = collect_obstacles(w, spec.layout, -1);
    const auto t_v = onboard_pose(sensors.onboard, ego).world_to_camera;
    for (std::size_t j = 0; j < w.pedestrians.size(); ++j) {
      if (auto d = try_detect(pose, Source::roadside, static_cast<int>(j), w.pedestrians[j],
                              obstacles, state.roadside, w.frame)) {
        out.push_back(fuse_v2i(*d, pose.world_to_camera, sensors.roadside.intrinsics, t_v,
                               sensors.onboard.intrinsics));
      }
    }
  }
  return out;
}

}  // namespace pedsafe::perception
