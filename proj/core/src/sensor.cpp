#include "pedsafe/sensor.hpp"

#include <numbers>
#include <string>

#include "pedsafe/error.hpp"

namespace pedsafe::perception {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

void SensorSpec::validate(const char* name) const {
  const std::string base = std::string("sensors.") + name;
  if (!(max_range > 0.0)) throw ConfigError(base + ".max_range", "must be positive");
  if (!(visibility_threshold > 0.0 && visibility_threshold <= 1.0)) {
    throw ConfigError(base + ".visibility_threshold", "must lie in (0, 1]");
  }
  if (!(blend_delta >= 0.0 && blend_delta <= std::numbers::sqrt3)) {
    throw ConfigError(base + ".blend_delta", "must lie in [0, sqrt(3)]");
  }
  if (!(blend_detect_prob >= 0.0 && blend_detect_prob <= 1.0)) {
    throw ConfigError(base + ".blend_detect_prob", "must lie in [0, 1]");
  }
  if (kmeans_k < 1) throw ConfigError(base + ".kmeans_k", "must be at least 1");
}

geometry::RigidTransform camera_extrinsics(const Vec3& position, double yaw_rad,
                                           double pitch_rad) {
  const Vec3 forward(std::cos(pitch_rad) * std::cos(yaw_rad),
                     std::cos(pitch_rad) * std::sin(yaw_rad), std::sin(pitch_rad));
  const Vec3 right(std::sin(yaw_rad), -std::cos(yaw_rad), 0.0);
  const Vec3 down = forward.cross(right);
  Eigen::Matrix3d r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return geometry::RigidTransform::from_rotation_translation(r, -r * position);
}

SensorSpec make_sensor(const Vec3& position, double yaw_deg, double pitch_deg, int width,
                       int height, double fov_deg, double max_range) {
  SensorSpec s;
  s.position = position;
  s.yaw_deg = yaw_deg;
  s.pitch_deg = pitch_deg;
  s.mount = camera_extrinsics(position, yaw_deg * kDeg, pitch_deg * kDeg);
  s.intrinsics = geometry::intrinsics_from_spec(width, height, fov_deg);
  s.max_range = max_range;
  return s;
}

SensorSpec default_onboard_sensor() {
  return make_sensor(Vec3(1.0, 0.0, 1.4), 0.0, 0.0, 1280, 720, 90.0, 50.0);
}

SensorSpec default_roadside_sensor(const Vec3& position, double yaw_deg) {
  return make_sensor(position, yaw_deg, -20.0, 1280, 720, 90.0, 50.0);
}

}  // namespace pedsafe::perception
