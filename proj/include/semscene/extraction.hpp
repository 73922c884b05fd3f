#pragma once

#include <map>

#include "semscene/dataset.hpp"
#include "semscene/layout.hpp"

namespace semscene {

/// Binary pixel mask of a single instance.
struct InstanceMask {
  int height = 0;
  int width = 0;
  int category = kFirstObjectCategory;
  std::vector<uint8_t> cells;  // row-major 0/1
  int pixel_count = 0;
  int min_row = 0, min_col = 0, max_row = 0, max_col = 0;  // inclusive bbox

  bool at(int r, int c) const { return cells[static_cast<size_t>(r) * width + c] != 0; }
  void validate() const;
};

inline constexpr double kFallbackThreshold = 0.001;

/// Per-category minimum instance-to-room pixel ratio.
struct ThresholdTable {
  std::map<int, double> ratios;
  double fallback = kFallbackThreshold;

  double threshold_for(int category) const;
};

nlohmann::json thresholds_to_json(const ThresholdTable& table);
ThresholdTable thresholds_from_json(const nlohmann::json& j);

/// Instance recovered from a generated map: mask, world-space bbox center,
/// and axis-aligned footprint extents.
struct ExtractedInstance {
  InstanceMask mask;
  Point2 center;     // meters
  double footprint_w = 0.0;  // x extent, meters
  double footprint_l = 0.0;  // z extent, meters
};

/// Maximal 4-connected regions of one object category, ordered by each
/// region's (min row, min col).
std::vector<InstanceMask> connected_components(const SemanticMap& map, int category);

/// Number of non-void pixels (the room area used as the ratio denominator).
int room_pixel_count(const SemanticMap& map);

/// Per category, the minimum over the dataset of instance pixels / room
/// pixels; categories absent from the dataset use the fallback.
ThresholdTable compute_thresholds(const std::vector<SceneRecord>& dataset);

/// Connected components per object category with sub-threshold regions
/// dropped; survivors carry bbox center and footprint in meters.
std::vector<ExtractedInstance> extract_instances(const SemanticMap& map,
                                                 const ThresholdTable& thresholds);

/// Extraction report: per-instance run-length encoded mask, center, footprint.
nlohmann::json extraction_report_to_json(const SemanticMap& map,
                                         const std::vector<ExtractedInstance>& instances);

}  // namespace semscene
