#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pedsafe/common.hpp"

namespace pedsafe::world {

/// Straight lane; travel direction runs from start to end.
struct Lane {
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::Zero();
  double width = 3.5;

  double length() const { return (end - start).norm(); }
  Vec2 direction() const { return (end - start).normalized(); }
  double heading() const;
  Vec2 point_at(double station) const { return start + direction() * station; }
  double station_of(const Vec2& p) const { return direction().dot(p - start); }
  /// Signed offset to the left of the centerline.
  double lateral_of(const Vec2& p) const;
  bool contains(const Vec2& p) const;
};

struct Crosswalk {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  double width = 4.0;
};

/// Extruded convex footprint (counter-clockwise) standing on the ground.
struct StaticObject {
  std::string name;
  std::vector<Vec2> footprint;
  double height = 0.0;
  Rgb color;
};

struct RoadLayout {
  std::vector<Lane> lanes;
  std::optional<Crosswalk> crosswalk;
  bool intersection = false;
  std::vector<StaticObject> static_objects;

  /// Throws ConfigError for non-positive lane widths, degenerate lanes,
  /// or a crosswalk that crosses no lane.
  void validate() const;
};

/// True when the segment p-q passes through the lane strip.
bool segment_crosses_lane(const Lane& lane, const Vec2& p, const Vec2& q);

}  // namespace pedsafe::world
