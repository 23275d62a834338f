#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

namespace pedsafe {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  bool operator==(const Rgb&) const = default;
};

inline double color_distance(const Rgb& a, const Rgb& b) {
  return std::sqrt((a.r - b.r) * (a.r - b.r) + (a.g - b.g) * (a.g - b.g) +
                   (a.b - b.b) * (a.b - b.b));
}

enum class Mode { single_vehicle = 0, v2i = 1 };

inline std::uint64_t mode_id(Mode m) { return static_cast<std::uint64_t>(m); }

inline std::string_view to_string(Mode m) {
  return m == Mode::single_vehicle ? "single_vehicle" : "v2i";
}

inline std::optional<Mode> mode_from_string(std::string_view s) {
  if (s == "single_vehicle") return Mode::single_vehicle;
  if (s == "v2i") return Mode::v2i;
  return std::nullopt;
}

inline Vec2 unit_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }

}  // namespace pedsafe
