#pragma once

#include <string_view>

#include "pedsafe/common.hpp"
#include "pedsafe/geometry.hpp"

namespace pedsafe::perception {

enum class Source { onboard, roadside };

inline std::string_view to_string(Source s) { return s == Source::onboard ? "onboard" : "roadside"; }

/// A perceived pedestrian. Pixel quantities live in the pixel plane of the
/// camera that reports the detection: the roadside camera for raw roadside
/// detections, the onboard camera for onboard and fused ones.
struct Detection {
  int frame = 0;
  Source source = Source::onboard;
  int pedestrian = 0;  // index into WorldState::pedestrians
  geometry::BoundingBox bbox;
  geometry::PixelPoint anchor;  // projected body center
  double est_distance = 0.0;    // camera-frame depth, m
  Vec2 est_position_world = Vec2::Zero();
  Vec2 truth_position_world = Vec2::Zero();  // evaluation only
  bool out_of_frame = false;    // fused point fell behind the onboard camera
};

}  // namespace pedsafe::perception
