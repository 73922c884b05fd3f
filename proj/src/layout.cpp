#include "semscene/layout.hpp"

#include <algorithm>

namespace semscene {

const char* to_string(RoomType type) {
  switch (type) {
    case RoomType::Bedroom: return "bedroom";
    case RoomType::Living: return "living";
    case RoomType::Dining: return "dining";
  }
  return "bedroom";
}

RoomType room_type_from_string(const std::string& s) {
  if (s == "bedroom") return RoomType::Bedroom;
  if (s == "living") return RoomType::Living;
  if (s == "dining") return RoomType::Dining;
  throw ConfigError("unknown room type '" + s + "'");
}

void ObjectInstance::validate() const {
  if (category < kFirstObjectCategory) throw CategoryError("instance category must be an object category");
  if (size.x <= 0.0 || size.y <= 0.0 || size.z <= 0.0)
    throw InstanceError("instance size components must be positive");
  if (orientation < 0 || orientation > 3)
    throw InstanceError("instance orientation class must be in {0,1,2,3}");
}

void SceneLayout::validate() const {
  map.validate();
  for (const auto& inst : instances) {
    inst.validate();
    if (inst.category >= map.K) throw CategoryError("instance category exceeds map K");
    bool found = std::any_of(map.cells.begin(), map.cells.end(),
                             [&](uint8_t c) { return c == inst.category; });
    if (!found) throw InstanceError("instance category missing from the semantic map");
  }
}

}  // namespace semscene
