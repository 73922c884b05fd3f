#pragma once

#include <string>
#include <vector>

#include "semscene/geometry.hpp"
#include "semscene/semantic_map.hpp"

namespace semscene {

/// One placed object: category, 3D bounding-box size in the local frame,
/// position (p_y = bottom-of-box offset above the floor), and one of four
/// axis-aligned orientation classes.
struct ObjectInstance {
  int category = kFirstObjectCategory;
  Vec3 size;      // meters, local frame
  Vec3 position;  // meters; x/z = footprint center, y = bottom offset
  int orientation = 0;  // r in {0,1,2,3} <-> front at 0/90/180/270 degrees

  /// World-axis footprint extents (width along x, length along z).
  Point2 world_footprint() const { return rotated_extents(size.x, size.z, orientation); }

  void validate() const;
};

/// Semantic map plus its instance annotations.
struct SceneLayout {
  SemanticMap map;
  std::vector<ObjectInstance> instances;
  int room_type = 0;

  /// Checks instance invariants and that every instance category appears
  /// in the map.
  void validate() const;
};

}  // namespace semscene
