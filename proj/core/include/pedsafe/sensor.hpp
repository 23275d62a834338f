#pragma once

#include "pedsafe/common.hpp"
#include "pedsafe/geometry.hpp"

namespace pedsafe::perception {

/// Camera sensor. For the roadside unit `mount` maps world -> camera; for
/// the onboard camera it maps the ego body frame (x forward, y left, z up,
/// origin at the footprint center on the ground) -> camera.
struct SensorSpec {
  geometry::RigidTransform mount;
  geometry::CameraIntrinsics intrinsics;
  double max_range = 50.0;             // m
  double visibility_threshold = 0.4;   // fraction of sample rays
  double blend_delta = 0.15;           // RGB distance
  double blend_detect_prob = 0.1;
  bool depth_quantization = true;      // 1/256 of max_range per sample
  int kmeans_k = 2;
  bool enabled = true;

  // Pose parameters the mount was built from, kept for config round trips.
  Vec3 position = Vec3::Zero();
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;

  /// Throws ConfigError naming the offending field.
  void validate(const char* name) const;
};

/// Parent -> camera transform for a camera at `position` looking along
/// `yaw` (about +z) and `pitch` (positive up), with no roll.
geometry::RigidTransform camera_extrinsics(const Vec3& position, double yaw_rad,
                                           double pitch_rad);

/// Builds a spec whose mount comes from the stored pose.
SensorSpec make_sensor(const Vec3& position, double yaw_deg, double pitch_deg, int width,
                       int height, double fov_deg, double max_range);

/// Onboard windshield camera: 1.0 m ahead of center, 1.4 m up, level.
SensorSpec default_onboard_sensor();

/// Roadside unit on a 6 m pole pitched down 20 degrees.
SensorSpec default_roadside_sensor(const Vec3& position, double yaw_deg);

}  // namespace pedsafe::perception
