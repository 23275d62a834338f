#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>
#include <vector>

#include "pedsafe/random.hpp"

namespace pedsafe::geometry {

/// Pinhole intrinsics. Principal point is always the image center and the
/// focal lengths are equal.
struct CameraIntrinsics {
  int width = 0;
  int height = 0;
  double fov_deg = 0.0;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  Eigen::Matrix3d matrix() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
  bool operator==(const PixelPoint&) const = default;
};

/// A point in a camera frame: X right, Y down, Z along the optical axis.
struct CameraPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static CameraPoint from(const Eigen::Vector3d& p) { return {p.x(), p.y(), p.z()}; }
  bool operator==(const CameraPoint&) const = default;
};

struct BoundingBox {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;

  /// Throws InvalidArgumentError when min > max on either axis.
  static BoundingBox make(double u_min, double v_min, double u_max, double v_max);

  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  double area() const { return width() * height(); }
  PixelPoint center() const { return {(u_min + u_max) / 2, (v_min + v_max) / 2}; }
  bool contains(const BoundingBox& other) const;
  bool operator==(const BoundingBox&) const = default;
};

/// Rigid 4x4 homogeneous transform (rotation + translation in meters).
/// The rotation block is checked for orthonormality with det +1 on every
/// construction path.
class RigidTransform {
 public:
  RigidTransform() : m_(Eigen::Matrix4d::Identity()) {}

  static RigidTransform identity() { return {}; }
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);
  static RigidTransform from_rotation_translation(const Eigen::Matrix3d& r,
                                                  const Eigen::Vector3d& t);
  static RigidTransform translation(const Eigen::Vector3d& t);

  const Eigen::Matrix4d& matrix() const { return m_; }
  Eigen::Matrix3d rotation() const { return m_.topLeftCorner<3, 3>(); }
  Eigen::Vector3d translation_part() const { return m_.topRightCorner<3, 1>(); }

  /// Closed-form rigid inverse [R^T, -R^T t].
  RigidTransform inverse() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const;
  RigidTransform operator*(const RigidTransform& rhs) const;

 private:
  explicit RigidTransform(const Eigen::Matrix4d& m) : m_(m) {}
  Eigen::Matrix4d m_;
};

inline constexpr double kRotationTolerance = 1e-9;

CameraIntrinsics intrinsics_from_spec(int width, int height, double fov_deg);

/// Throws InvalidDepthError when depth <= 0.
CameraPoint backproject(const PixelPoint& p, double depth, const CameraIntrinsics& k);

/// Throws BehindCameraError when P.z <= 0.
PixelPoint project(const CameraPoint& p, const CameraIntrinsics& k);

/// P_V = T_V * T_I^-1 * P_I, with T_I and T_V world->camera transforms.
CameraPoint transfer_point(const CameraPoint& p_i, const RigidTransform& t_i,
                           const RigidTransform& t_v);

/// Roadside pixel at a depth -> vehicle pixel, as one call.
PixelPoint transfer_pixel(const PixelPoint& p_i, double depth, const CameraIntrinsics& k_i,
                          const RigidTransform& t_i, const RigidTransform& t_v,
                          const CameraIntrinsics& k_v);

struct DepthCluster {
  double center = 0.0;
  std::size_t size = 0;
};

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance_m = 1e-6;
};

/// 1-D k-means (k-means++ seeding, Lloyd refinement). Centers come back
/// sorted ascending; a depth equidistant from two centers joins the smaller.
std::vector<DepthCluster> cluster_depths(std::span<const double> depths, int k,
                                         RandomStream& rng, const KMeansOptions& opts = {});

/// Per-pixel depths over a rectangular image region, row-major.
struct DepthPatch {
  BoundingBox region;
  int cols = 0;
  int rows = 0;
  std::vector<double> depths;
};

/// Distance of the nearest non-empty depth cluster inside the box.
double pedestrian_distance_from_bbox(const BoundingBox& bbox, const DepthPatch& patch, int k,
                                     RandomStream& rng);

double bbox_iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace pedsafe::geometry
