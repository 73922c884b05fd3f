#include "semscene/json_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace semscene {

using nlohmann::json;

json map_to_json(const SemanticMap& map) {
  json j;
  j["version"] = kMapJsonVersion;
  j["K"] = map.K;
  j["scale"] = map.scale;
  j["H"] = map.height;
  j["W"] = map.width;
  j["cells"] = map.cells;
  return j;
}

SemanticMap map_from_json(const json& j) {
  if (!j.contains("version") || j.at("version").get<int>() != kMapJsonVersion)
    throw DataError("semantic map JSON has unsupported version");
  SemanticMap map(j.at("H").get<int>(), j.at("W").get<int>(), j.at("scale").get<double>(),
                  j.at("K").get<int>());
  map.cells = j.at("cells").get<std::vector<uint8_t>>();
  map.validate();
  return map;
}

json arch_mask_to_json(const ArchMask& mask) {
  json j;
  j["H"] = mask.height;
  j["W"] = mask.width;
  j["cells"] = mask.cells;
  return j;
}

ArchMask arch_mask_from_json(const json& j) {
  ArchMask mask(j.at("H").get<int>(), j.at("W").get<int>(), 0);
  mask.cells = j.at("cells").get<std::vector<uint8_t>>();
  if (mask.cells.size() != mask.size()) throw DataError("arch mask cell count mismatch");
  for (uint8_t v : mask.cells)
    if (v > 3) throw DataError("arch mask cell outside {0,1,2,3}");
  return mask;
}

json scene_record_to_json(const SceneLayout& layout, const ArchMask& arch) {
  json j;
  j["version"] = kSceneJsonVersion;
  j["room_type"] = to_string(static_cast<RoomType>(layout.room_type));
  j["map"] = map_to_json(layout.map);
  j["arch_mask"] = arch_mask_to_json(arch);
  json instances = json::array();
  for (const auto& inst : layout.instances) {
    instances.push_back({{"category", inst.category},
                         {"size", {inst.size.x, inst.size.y, inst.size.z}},
                         {"position", {inst.position.x, inst.position.y, inst.position.z}},
                         {"orientation", inst.orientation}});
  }
  j["instances"] = instances;
  return j;
}

std::pair<SceneLayout, ArchMask> scene_record_from_json(const json& j) {
  if (!j.contains("version") || j.at("version").get<int>() != kSceneJsonVersion)
    throw DataError("scene record JSON has unsupported version");
  SceneLayout layout;
  layout.room_type = static_cast<int>(room_type_from_string(j.at("room_type").get<std::string>()));
  layout.map = map_from_json(j.at("map"));
  for (const auto& ji : j.at("instances")) {
    ObjectInstance inst;
    inst.category = ji.at("category").get<int>();
    auto s = ji.at("size");
    inst.size = {s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()};
    auto p = ji.at("position");
    inst.position = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
    inst.orientation = ji.at("orientation").get<int>();
    inst.validate();
    layout.instances.push_back(inst);
  }
  ArchMask arch = arch_mask_from_json(j.at("arch_mask"));
  if (arch.height != layout.map.height || arch.width != layout.map.width)
    throw DataError("arch mask dimensions do not match the map");
  return {std::move(layout), std::move(arch)};
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::filesystem::path& path, const json& j, int indent) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(indent) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace semscene
