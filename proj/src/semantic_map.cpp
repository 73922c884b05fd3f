#include "semscene/semantic_map.hpp"

#include <algorithm>
#include <cmath>

namespace semscene {

void CategoricalGrid::validate(double tol) const {
  for (size_t p = 0; p < pixel_count(); ++p) {
    double sum = 0.0;
    for (double v : pixel(p)) {
      if (v < 0.0) throw DistributionError("categorical grid has a negative entry");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > tol)
      throw DistributionError("categorical grid pixel does not sum to 1");
  }
}

std::vector<uint8_t> CategoricalGrid::argmax() const {
  std::vector<uint8_t> out(pixel_count());
  for (size_t p = 0; p < pixel_count(); ++p) {
    auto px = pixel(p);
    int best = 0;
    for (int k = 1; k < K; ++k)
      if (px[k] > px[best]) best = k;
    out[p] = static_cast<uint8_t>(best);
  }
  return out;
}

SemanticMap::SemanticMap(int h, int w, double scale_m, int k, uint8_t fill)
    : height(h), width(w), scale(scale_m), K(k), cells(static_cast<size_t>(h) * w, fill) {
  if (h <= 0 || w <= 0) throw ShapeError("semantic map dimensions must be positive");
  if (scale_m <= 0.0) throw ConfigError("semantic map scale must be positive");
  if (k < kFirstObjectCategory + 1) throw ConfigError("semantic map K must be at least 5");
}

void SemanticMap::validate() const {
  if (height <= 0 || width <= 0) throw ShapeError("semantic map dimensions must be positive");
  if (scale <= 0.0) throw ConfigError("semantic map scale must be positive");
  if (cells.size() != static_cast<size_t>(height) * width)
    throw ShapeError("semantic map cell count does not match dimensions");
  for (uint8_t c : cells)
    if (c >= K) throw CategoryError("semantic map cell index exceeds K");
}

const char* to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::None: return "none";
    case ConditionKind::Floor: return "floor";
    case ConditionKind::Arch: return "arch";
  }
  return "none";
}

ConditionKind condition_kind_from_string(const std::string& s) {
  if (s == "none") return ConditionKind::None;
  if (s == "floor") return ConditionKind::Floor;
  if (s == "arch") return ConditionKind::Arch;
  throw ConfigError("unknown condition kind '" + s + "' (expected none|floor|arch)");
}

void ConditionSpec::validate() const {
  bool any_floor = false;
  for (uint8_t v : mask.cells) {
    if (v > 3) throw CategoryError("arch mask cell outside {0,1,2,3}");
    if (kind == ConditionKind::None && v != 0)
      throw ConfigError("condition kind none requires an all-zero mask");
    if (kind == ConditionKind::Floor && v > 1)
      throw ConfigError("condition kind floor requires a binary mask");
    if (v == kFloor) any_floor = true;
  }
  if (kind != ConditionKind::None && !any_floor)
    throw ConfigError("floor/arch condition mask needs at least one floor cell");
}

SemanticMap pad_to_canvas(const SemanticMap& map, int target_h, int target_w) {
  if (target_h < map.height || target_w < map.width)
    throw ShapeError("pad_to_canvas target smaller than input map");
  SemanticMap out(target_h, target_w, map.scale, map.K, kVoid);
  int off_r = (target_h - map.height) / 2;
  int off_c = (target_w - map.width) / 2;
  for (int r = 0; r < map.height; ++r)
    for (int c = 0; c < map.width; ++c)
      out.at(r + off_r, c + off_c) = map.at(r, c);
  return out;
}

WorldXZ pixel_to_world(int row, int col, const SemanticMap& map) {
  if (!map.in_bounds(row, col)) throw IndexError("pixel_to_world index out of bounds");
  return {(col + 0.5) * map.scale, (row + 0.5) * map.scale};
}

std::pair<int, int> world_to_pixel(double x, double z, const SemanticMap& map) {
  int col = static_cast<int>(std::floor(x / map.scale));
  int row = static_cast<int>(std::floor(z / map.scale));
  if (!map.in_bounds(row, col)) throw IndexError("world_to_pixel coordinate out of bounds");
  return {row, col};
}

CategoricalGrid one_hot(const SemanticMap& map, int K) {
  CategoricalGrid grid(map.height, map.width, K, 0.0);
  for (size_t p = 0; p < map.cells.size(); ++p) {
    uint8_t cat = map.cells[p];
    if (cat >= K) throw CategoryError("one_hot: cell category >= K");
    grid.values[p * K + cat] = 1.0;
  }
  return grid;
}

SemanticMap argmax_map(const CategoricalGrid& grid, double scale) {
  SemanticMap map(grid.height, grid.width, scale, grid.K);
  map.cells = grid.argmax();
  return map;
}

ArchMask arch_mask_from_map(const SemanticMap& map) {
  ArchMask mask(map.height, map.width, 0);
  for (size_t p = 0; p < map.cells.size(); ++p) {
    uint8_t cat = map.cells[p];
    mask.cells[p] = cat >= kFirstObjectCategory ? static_cast<uint8_t>(kFloor) : cat;
  }
  return mask;
}

ArchMask floor_mask_from_arch(const ArchMask& arch) {
  ArchMask mask(arch.height, arch.width, 0);
  for (size_t p = 0; p < arch.cells.size(); ++p)
    mask.cells[p] = arch.cells[p] != kVoid ? 1 : 0;
  return mask;
}

ConditionSpec make_condition(ConditionKind kind, const ArchMask& gt_arch, int room_type) {
  ConditionSpec cond;
  cond.kind = kind;
  cond.room_type = room_type;
  switch (kind) {
    case ConditionKind::None:
      cond.mask = ArchMask(gt_arch.height, gt_arch.width, 0);
      break;
    case ConditionKind::Floor:
      cond.mask = floor_mask_from_arch(gt_arch);
      break;
    case ConditionKind::Arch:
      cond.mask = gt_arch;
      break;
  }
  return cond;
}

}  // namespace semscene
