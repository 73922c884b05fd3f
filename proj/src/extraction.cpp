#include "semscene/extraction.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

namespace semscene {

using nlohmann::json;

void InstanceMask::validate() const {
  if (pixel_count < 1) throw InstanceError("instance mask has no set pixels");
  int count = 0;
  for (uint8_t v : cells) count += v != 0;
  if (count != pixel_count) throw InstanceError("instance mask pixel count mismatch");
}

double ThresholdTable::threshold_for(int category) const {
  auto it = ratios.find(category);
  return it == ratios.end() ? fallback : it->second;
}

json thresholds_to_json(const ThresholdTable& table) {
  json j;
  j["fallback"] = table.fallback;
  json ratios = json::object();
  for (const auto& [cat, ratio] : table.ratios) ratios[std::to_string(cat)] = ratio;
  j["ratios"] = ratios;
  return j;
}

ThresholdTable thresholds_from_json(const json& j) {
  ThresholdTable table;
  table.fallback = j.at("fallback").get<double>();
  for (const auto& [key, value] : j.at("ratios").items())
    table.ratios[std::stoi(key)] = value.get<double>();
  return table;
}

std::vector<InstanceMask> connected_components(const SemanticMap& map, int category) {
  if (category < kFirstObjectCategory)
    throw CategoryError("connected_components expects an object category");
  const int H = map.height, W = map.width;
  std::vector<int> label(static_cast<size_t>(H) * W, -1);
  std::vector<InstanceMask> comps;
  std::vector<size_t> stack;

  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      size_t p = static_cast<size_t>(r) * W + c;
      if (map.cells[p] != category || label[p] != -1) continue;
      int id = static_cast<int>(comps.size());
      InstanceMask mask;
      mask.height = H;
      mask.width = W;
      mask.category = category;
      mask.cells.assign(static_cast<size_t>(H) * W, 0);
      mask.min_row = mask.max_row = r;
      mask.min_col = mask.max_col = c;

      stack.clear();
      stack.push_back(p);
      label[p] = id;
      while (!stack.empty()) {
        size_t q = stack.back();
        stack.pop_back();
        int qr = static_cast<int>(q) / W, qc = static_cast<int>(q) % W;
        mask.cells[q] = 1;
        ++mask.pixel_count;
        mask.min_row = std::min(mask.min_row, qr);
        mask.max_row = std::max(mask.max_row, qr);
        mask.min_col = std::min(mask.min_col, qc);
        mask.max_col = std::max(mask.max_col, qc);
        const int nr[4] = {qr - 1, qr + 1, qr, qr};
        const int nc[4] = {qc, qc, qc - 1, qc + 1};
        for (int i = 0; i < 4; ++i) {
          if (nr[i] < 0 || nr[i] >= H || nc[i] < 0 || nc[i] >= W) continue;
          size_t n = static_cast<size_t>(nr[i]) * W + nc[i];
          if (map.cells[n] == category && label[n] == -1) {
            label[n] = id;
            stack.push_back(n);
          }
        }
      }
      comps.push_back(std::move(mask));
    }
  }
  std::sort(comps.begin(), comps.end(), [](const InstanceMask& a, const InstanceMask& b) {
    if (a.min_row != b.min_row) return a.min_row < b.min_row;
    return a.min_col < b.min_col;
  });
  return comps;
}

int room_pixel_count(const SemanticMap& map) {
  int count = 0;
  for (uint8_t c : map.cells) count += c != kVoid;
  return count;
}

ThresholdTable compute_thresholds(const std::vector<SceneRecord>& dataset) {
  if (dataset.empty()) throw DataError("compute_thresholds: empty dataset");
  ThresholdTable table;
  for (const auto& rec : dataset) {
    int room = room_pixel_count(rec.layout.map);
    if (room == 0) continue;
    for (int cat = kFirstObjectCategory; cat < rec.layout.map.K; ++cat) {
      for (const auto& comp : connected_components(rec.layout.map, cat)) {
        double ratio = static_cast<double>(comp.pixel_count) / room;
        auto it = table.ratios.find(cat);
        if (it == table.ratios.end() || ratio < it->second) table.ratios[cat] = ratio;
      }
    }
  }
  return table;
}

std::vector<ExtractedInstance> extract_instances(const SemanticMap& map,
                                                 const ThresholdTable& thresholds) {
  std::vector<ExtractedInstance> out;
  const int room = room_pixel_count(map);
  if (room == 0) return out;
  for (int cat = kFirstObjectCategory; cat < map.K; ++cat) {
    for (auto& comp : connected_components(map, cat)) {
      double ratio = static_cast<double>(comp.pixel_count) / room;
      if (ratio < thresholds.threshold_for(cat)) continue;
      ExtractedInstance inst;
      inst.center = {(comp.min_col + comp.max_col + 1) * 0.5 * map.scale,
                     (comp.min_row + comp.max_row + 1) * 0.5 * map.scale};
      inst.footprint_w = (comp.max_col - comp.min_col + 1) * map.scale;
      inst.footprint_l = (comp.max_row - comp.min_row + 1) * map.scale;
      inst.mask = std::move(comp);
      out.push_back(std::move(inst));
    }
  }
  return out;
}

json extraction_report_to_json(const SemanticMap& map,
                               const std::vector<ExtractedInstance>& instances) {
  json j;
  j["H"] = map.height;
  j["W"] = map.width;
  j["scale"] = map.scale;
  json list = json::array();
  for (const auto& inst : instances) {
    // Run-length encoding over the row-major mask: (start, length) pairs.
    json runs = json::array();
    size_t p = 0;
    const auto& cells = inst.mask.cells;
    while (p < cells.size()) {
      if (cells[p]) {
        size_t start = p;
        while (p < cells.size() && cells[p]) ++p;
        runs.push_back({start, p - start});
      } else {
        ++p;
      }
    }
    list.push_back({{"category", inst.mask.category},
                    {"pixels", inst.mask.pixel_count},
                    {"mask_rle", runs},
                    {"center", {inst.center.x, inst.center.z}},
                    {"footprint", {inst.footprint_w, inst.footprint_l}}});
  }
  j["instances"] = list;
  return j;
}

}  // namespace semscene
