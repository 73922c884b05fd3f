#pragma once

#include <filesystem>
#include <optional>

#include "semscene/json_io.hpp"
#include "semscene/layout.hpp"
#include "semscene/palette.hpp"

namespace semscene {

/// One ground-truth sample: layout plus its arch mask.
struct SceneRecord {
  SceneLayout layout;
  ArchMask arch;
};

struct DatasetManifest {
  uint64_t seed = 0;
  int count_train = 0;
  int count_val = 0;
  int count_test = 0;
  double ratio_train = 0.7;
  double ratio_val = 0.1;
  double ratio_test = 0.2;
  uint64_t palette_hash = 0;
  uint64_t grammar_hash = 0;
  std::string palette_preset = "desk";
  int grid = 0;
  double scale = 0.0;

  void validate() const;
};

inline constexpr int kManifestVersion = 1;

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

DatasetManifest load_manifest(const std::filesystem::path& dataset_dir);

/// splits/{train,val,test}/scene_%06d.json
std::filesystem::path split_dir(const std::filesystem::path& dataset_dir, const std::string& split);

std::vector<SceneRecord> load_split(const std::filesystem::path& dataset_dir,
                                    const std::string& split,
                                    std::optional<int> limit = std::nullopt);

}  // namespace semscene
