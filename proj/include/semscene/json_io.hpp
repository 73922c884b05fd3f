#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>

#include "semscene/layout.hpp"

namespace semscene {

inline constexpr int kMapJsonVersion = 1;
inline constexpr int kSceneJsonVersion = 1;

nlohmann::json map_to_json(const SemanticMap& map);
SemanticMap map_from_json(const nlohmann::json& j);

nlohmann::json arch_mask_to_json(const ArchMask& mask);
ArchMask arch_mask_from_json(const nlohmann::json& j);

/// Dataset record: layout + ground-truth arch mask + attribute annotations.
nlohmann::json scene_record_to_json(const SceneLayout& layout, const ArchMask& arch);
std::pair<SceneLayout, ArchMask> scene_record_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const nlohmann::json& j, int indent = 2);

}  // namespace semscene
