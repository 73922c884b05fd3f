#pragma once

#include <cstdint>
#include <utility>

#include "semscene/grid.hpp"
#include "semscene/palette.hpp"

namespace semscene {

/// Top-down category-index grid at a fixed meters-per-pixel scale.
/// Row index maps to world z, column index to world x; the floor plane is y=0.
struct SemanticMap {
  int height = 0;
  int width = 0;
  double scale = 0.0;  // meters per pixel
  int K = 0;           // palette size the cells index into
  std::vector<uint8_t> cells;  // row-major

  SemanticMap() = default;
  SemanticMap(int h, int w, double scale_m, int k, uint8_t fill = kVoid);

  bool in_bounds(int r, int c) const { return r >= 0 && r < height && c >= 0 && c < width; }
  uint8_t at(int r, int c) const { return cells[static_cast<size_t>(r) * width + c]; }
  uint8_t& at(int r, int c) { return cells[static_cast<size_t>(r) * width + c]; }

  /// Enforces the type invariants (positive dims/scale, cells < K).
  void validate() const;

  bool operator==(const SemanticMap&) const = default;
};

inline constexpr int kRoomTypeCount = 3;

enum class RoomType : int { Bedroom = 0, Living = 1, Dining = 2 };

const char* to_string(RoomType type);
RoomType room_type_from_string(const std::string& s);

/// Conditioning grid over {void, floor, door, window}. A floor mask is the
/// degenerate case with values in {0, 1}.
using ArchMask = Grid<uint8_t>;

enum class ConditionKind : int { None = 0, Floor = 1, Arch = 2 };

const char* to_string(ConditionKind kind);
ConditionKind condition_kind_from_string(const std::string& s);

/// Sampler conditioning: mask grid + room type, disambiguated by kind.
struct ConditionSpec {
  ConditionKind kind = ConditionKind::None;
  ArchMask mask;
  int room_type = 0;

  /// Checks the kind/mask invariants (None => all zero, Floor => binary,
  /// Floor/Arch => at least one floor cell).
  void validate() const;
};

/// World (x, z) position in meters.
struct WorldXZ {
  double x = 0.0;
  double z = 0.0;
};

/// Centers the map on a larger void canvas (offset = floor(margin/2) per axis).
SemanticMap pad_to_canvas(const SemanticMap& map, int target_h, int target_w);

/// Pixel-center world coordinates: x = (col+0.5)*scale, z = (row+0.5)*scale.
WorldXZ pixel_to_world(int row, int col, const SemanticMap& map);

/// Inverse of pixel_to_world; floors the division.
std::pair<int, int> world_to_pixel(double x, double z, const SemanticMap& map);

/// Per-pixel one-hot expansion. Every cell must be < K.
CategoricalGrid one_hot(const SemanticMap& map, int K);

/// Collapses a per-pixel distribution back to the argmax category map.
SemanticMap argmax_map(const CategoricalGrid& grid, double scale);

/// Ground-truth arch mask: object categories collapse to floor, the
/// reserved categories pass through.
ArchMask arch_mask_from_map(const SemanticMap& map);

/// Binary floor mask: non-void arch cells become floor.
ArchMask floor_mask_from_arch(const ArchMask& arch);

/// Builds the conditioning input of the requested kind from a ground-truth
/// arch mask (None => zero mask, Floor => binarized, Arch => unchanged).
ConditionSpec make_condition(ConditionKind kind, const ArchMask& gt_arch, int room_type);

}  // namespace semscene
