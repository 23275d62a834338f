#include "pedsafe/road.hpp"

#include <algorithm>
#include <cmath>

#include "pedsafe/error.hpp"

namespace pedsafe::world {

double Lane::heading() const {
  const Vec2 d = end - start;
  return std::atan2(d.y(), d.x());
}

double Lane::lateral_of(const Vec2& p) const {
  const Vec2 d = direction();
  const Vec2 r = p - start;
  return d.x() * r.y() - d.y() * r.x();
}

bool Lane::contains(const Vec2& p) const {
  const double s = station_of(p);
  return s >= 0.0 && s <= length() && std::abs(lateral_of(p)) <= width / 2;
}

bool segment_crosses_lane(const Lane& lane, const Vec2& p, const Vec2& q) {
  // Clip the segment against the lane rectangle expressed in (station, lateral).
  const double s0 = lane.station_of(p), s1 = lane.station_of(q);
  const double l0 = lane.lateral_of(p), l1 = lane.lateral_of(q);
  double t_lo = 0.0, t_hi = 1.0;
  auto clip = [&](double a0, double a1, double lo, double hi) {
    const double da = a1 - a0;
    if (da == 0.0) return a0 >= lo && a0 <= hi;
    double ta = (lo - a0) / da, tb = (hi - a0) / da;
    if (ta > tb) std::swap(ta, tb);
    t_lo = std::max(t_lo, ta);
    t_hi = std::min(t_hi, tb);
    return t_lo <= t_hi;
  };
  return clip(s0, s1, 0.0, lane.length()) && clip(l0, l1, -lane.width / 2, lane.width / 2);
}

void RoadLayout::validate() const {
  if (lanes.empty()) throw ConfigError("layout.lanes", "at least one lane is required");
  for (const auto& lane : lanes) {
    if (!(lane.width > 0.0)) throw ConfigError("layout.lanes", "lane width must be positive");
    if (!(lane.length() > 0.0)) throw ConfigError("layout.lanes", "lane has zero length");
  }
  if (crosswalk) {
    const bool hits = std::any_of(lanes.begin(), lanes.end(), [&](const Lane& l) {
      return segment_crosses_lane(l, crosswalk->a, crosswalk->b);
    });
    if (!hits) throw ConfigError("layout.crosswalk", "crosswalk does not cross any lane");
  }
  for (const auto& obj : static_objects) {
    if (obj.footprint.size() < 3 || !(obj.height > 0.0)) {
      throw ConfigError("layout.static_objects", "object '" + obj.name + "' is degenerate");
    }
  }
}

}  // namespace pedsafe::world
