#include "pedsafe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pedsafe/error.hpp"

namespace pedsafe::geometry {

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

BoundingBox BoundingBox::make(double u_min, double v_min, double u_max, double v_max) {
  if (!(u_min <= u_max) || !(v_min <= v_max)) {
    throw InvalidArgumentError("bounding box min exceeds max");
  }
  return {u_min, v_min, u_max, v_max};
}

bool BoundingBox::contains(const BoundingBox& o) const {
  return o.u_min >= u_min && o.v_min >= v_min && o.u_max <= u_max && o.v_max <= v_max;
}

namespace {

void check_rotation(const Eigen::Matrix3d& r) {
  if (!r.allFinite()) throw InvalidTransformError("rotation has non-finite entries");
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTolerance) {
    throw InvalidTransformError("rotation block is not orthonormal");
  }
  if (std::abs(r.determinant() - 1.0) > kRotationTolerance) {
    throw InvalidTransformError("rotation block determinant is not +1");
  }
}

}  // namespace

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  check_rotation(m.topLeftCorner<3, 3>());
  if (!m.topRightCorner<3, 1>().allFinite()) {
    throw InvalidTransformError("translation has non-finite entries");
  }
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    throw InvalidTransformError("bottom row must be [0 0 0 1]");
  }
  return RigidTransform(m);
}

RigidTransform RigidTransform::from_rotation_translation(const Eigen::Matrix3d& r,
                                                         const Eigen::Vector3d& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return from_matrix(m);
}

RigidTransform RigidTransform::translation(const Eigen::Vector3d& t) {
  return from_rotation_translation(Eigen::Matrix3d::Identity(), t);
}

RigidTransform RigidTransform::inverse() const {
  Eigen::Matrix4d inv = Eigen::Matrix4d::Identity();
  const Eigen::Matrix3d rt = rotation().transpose();
  inv.topLeftCorner<3, 3>() = rt;
  inv.topRightCorner<3, 1>() = -rt * translation_part();
  return RigidTransform(inv);
}

Eigen::Vector3d RigidTransform::apply(const Eigen::Vector3d& p) const {
  return (m_ * p.homogeneous()).head<3>();
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  return RigidTransform(m_ * rhs.m_);
}

CameraIntrinsics intrinsics_from_spec(int width, int height, double fov_deg) {
  if (width <= 0 || height <= 0) {
    throw InvalidSpecError("image dimensions must be positive");
  }
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw InvalidSpecError("fov_deg must lie in (0, 180), got " + std::to_string(fov_deg));
  }
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.fov_deg = fov_deg;
  const double half_fov = fov_deg * std::numbers::pi / 180.0 / 2.0;
  k.fx = static_cast<double>(width) / (2.0 * std::tan(half_fov));
  k.fy = k.fx;
  k.cx = static_cast<double>(width) / 2.0;
  k.cy = static_cast<double>(height) / 2.0;
  return k;
}

CameraPoint backproject(const PixelPoint& p, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) throw InvalidDepthError("depth must be positive");
  return {(p.u - k.cx) * depth / k.fx, (p.v - k.cy) * depth / k.fy, depth};
}

PixelPoint project(const CameraPoint& p, const CameraIntrinsics& k) {
  if (!(p.z > 0.0)) throw BehindCameraError("point is not in front of the camera");
  return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

CameraPoint transfer_point(const CameraPoint& p_i, const RigidTransform& t_i,
                           const RigidTransform& t_v) {
  const Eigen::Vector3d world = t_i.inverse().apply(p_i.vec());
  return CameraPoint::from(t_v.apply(world));
}

PixelPoint transfer_pixel(const PixelPoint& p_i, double depth, const CameraIntrinsics& k_i,
                          const RigidTransform& t_i, const RigidTransform& t_v,
                          const CameraIntrinsics& k_v) {
  return project(transfer_point(backproject(p_i, depth, k_i), t_i, t_v), k_v);
}

double pedestrian_distance_from_bbox(const BoundingBox& bbox, const DepthPatch& patch, int k,
                                     RandomStream& rng) {
  if (patch.cols <= 0 || patch.rows <= 0 ||
      patch.depths.size() != static_cast<std::size_t>(patch.cols) * patch.rows) {
    throw InvalidArgumentError("depth patch shape does not match its sample count");
  }
  if (!patch.region.contains(bbox)) {
    throw InvalidArgumentError("depth patch does not cover the bounding box");
  }
  const double du = patch.region.width() / patch.cols;
  const double dv = patch.region.height() / patch.rows;
  std::vector<double> inside;
  inside.reserve(patch.depths.size());
  for (int r = 0; r < patch.rows; ++r) {
    const double v = patch.region.v_min + (r + 0.5) * dv;
    for (int c = 0; c < patch.cols; ++c) {
      const double u = patch.region.u_min + (c + 0.5) * du;
      if (u >= bbox.u_min && u <= bbox.u_max && v >= bbox.v_min && v <= bbox.v_max) {
        inside.push_back(patch.depths[static_cast<std::size_t>(r) * patch.cols + c]);
      }
    }
  }
  const int clusters = std::min<int>(k, static_cast<int>(inside.size()));
  const auto result = cluster_depths(inside, std::max(clusters, 1), rng);
  for (const auto& c : result) {
    if (c.size > 0) return c.center;
  }
  return result.front().center;
}

double bbox_iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.u_max, b.u_max) - std::max(a.u_min, b.u_min);
  const double ih = std::min(a.v_max, b.v_max) - std::max(a.v_min, b.v_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace pedsafe::geometry
