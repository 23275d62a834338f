#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "pedsafe/common.hpp"
#include "pedsafe/detection.hpp"
#include "pedsafe/geometry.hpp"
#include "pedsafe/random.hpp"
#include "pedsafe/scenario.hpp"
#include "pedsafe/sensor.hpp"
#include "pedsafe/world.hpp"

namespace pedsafe::perception {

/// Convex footprint (counter-clockwise) extruded from the ground to `height`.
struct Obstacle {
  std::vector<Vec2> footprint;
  double height = 0.0;
  Rgb color;
};

/// Vehicles and static objects, skipping the vehicle `carrier` (the ego
/// when the camera rides on it; -1 for none).
std::vector<Obstacle> collect_obstacles(const world::WorldState& w, const world::RoadLayout& layout,
                                        int carrier);

/// A sensor placed in the world for one frame.
struct SensorPose {
  const SensorSpec* spec = nullptr;
  geometry::RigidTransform world_to_camera;
  Vec3 origin = Vec3::Zero();  // camera center, world frame
};

SensorPose roadside_pose(const SensorSpec& spec);
SensorPose onboard_pose(const SensorSpec& spec, const world::VehicleState& carrier);

/// Head, torso center, two shoulders (offset across the line of sight) and
/// feet, in world coordinates.
std::array<Vec3, 5> sample_points(const world::PedestrianState& ped, const Vec3& camera);

/// Parameter t in [0, 1) at which the segment a->b first enters the prism,
/// if it does.
std::optional<double> segment_entry(const Vec3& a, const Vec3& b, const Obstacle& o);

/// Fraction of the sample points that are in front of the camera, inside
/// the image, within range and not blocked by any obstacle.
double visible_fraction(const SensorPose& pose, const world::PedestrianState& ped,
                        std::span<const Obstacle> obstacles);

struct Backdrop {
  double gap = 0.0;    // m behind the pedestrian center along the sight line
  double depth = 0.0;  // camera-frame Z of the hit point
  Rgb color;
};

/// First obstacle hit by the camera->torso ray beyond the pedestrian,
/// within sensor range.
std::optional<Backdrop> find_backdrop(const SensorPose& pose, const world::PedestrianState& ped,
                                      std::span<const Obstacle> obstacles);

inline constexpr double kBlendMaxGap = 2.0;  // m
inline constexpr int kPatchCols = 10;
inline constexpr int kPatchRows = 20;

/// Per-episode state of one camera: its random stream and the single
/// blending draw taken at episode start.
struct SensorChannel {
  RandomStream rng{0};
  double blend_draw = 1.0;

  static SensorChannel open(RandomStream rng);
};

/// Projected extent of the pedestrian's 0.5 x 0.5 x height box, clipped
/// to the image; nullopt when no corner is in front of the camera.
std::optional<geometry::BoundingBox> projected_bbox(const SensorPose& pose,
                                                    const world::PedestrianState& ped);

/// Analytic depth patch over the box: pedestrian pixels at `ped_depth`,
/// 30% of pixels at the backdrop depth when there is one.
geometry::DepthPatch make_depth_patch(const geometry::BoundingBox& bbox, double ped_depth,
                                      std::optional<double> backdrop_depth);

/// Rounds to the sensor's depth step (max_range / 256) when enabled.
double quantize_depth(const SensorSpec& spec, double depth);

std::optional<Detection> try_detect(const SensorPose& pose, Source source, int pedestrian,
                                    const world::PedestrianState& ped,
                                    std::span<const Obstacle> obstacles, SensorChannel& channel,
                                    int frame);

/// Maps a roadside detection into the onboard pixel plane: bbox corners
/// and anchor are back-projected at est_distance, transferred and
/// projected. A transferred point behind the onboard camera sets
/// out_of_frame; est_distance then becomes the Euclidean range.
Detection fuse_v2i(const Detection& roadside, const geometry::RigidTransform& t_i,
                   const geometry::CameraIntrinsics& k_i, const geometry::RigidTransform& t_v,
                   const geometry::CameraIntrinsics& k_v);

struct PerceptionState {
  SensorChannel onboard;
  SensorChannel roadside;

  static PerceptionState open(const RandomStream& episode);
};

/// single_vehicle: onboard detections. v2i: onboard plus fused roadside
/// detections.
std::vector<Detection> perceive(const world::WorldState& w, Mode mode,
                                const world::ScenarioConfig& spec, PerceptionState& state);

}  // namespace pedsafe::perception
