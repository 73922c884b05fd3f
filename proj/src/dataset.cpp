#include "semscene/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace semscene {

using nlohmann::json;

void DatasetManifest::validate() const {
  if (std::fabs(ratio_train + ratio_val + ratio_test - 1.0) > 1e-9)
    throw ConfigError("dataset split ratios must sum to 1");
  if (count_train < 0 || count_val < 0 || count_test < 0)
    throw DataError("dataset split counts must be non-negative");
}

json manifest_to_json(const DatasetManifest& m) {
  json j;
  j["version"] = kManifestVersion;
  j["seed"] = m.seed;
  j["counts"] = {{"train", m.count_train}, {"val", m.count_val}, {"test", m.count_test}};
  j["ratios"] = {{"train", m.ratio_train}, {"val", m.ratio_val}, {"test", m.ratio_test}};
  j["palette_hash"] = m.palette_hash;
  j["grammar_hash"] = m.grammar_hash;
  j["palette_preset"] = m.palette_preset;
  j["grid"] = m.grid;
  j["scale"] = m.scale;
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  if (!j.contains("version") || j.at("version").get<int>() != kManifestVersion)
    throw DataError("dataset manifest has unsupported version");
  DatasetManifest m;
  m.seed = j.at("seed").get<uint64_t>();
  m.count_train = j.at("counts").at("train").get<int>();
  m.count_val = j.at("counts").at("val").get<int>();
  m.count_test = j.at("counts").at("test").get<int>();
  m.ratio_train = j.at("ratios").at("train").get<double>();
  m.ratio_val = j.at("ratios").at("val").get<double>();
  m.ratio_test = j.at("ratios").at("test").get<double>();
  m.palette_hash = j.at("palette_hash").get<uint64_t>();
  m.grammar_hash = j.at("grammar_hash").get<uint64_t>();
  m.palette_preset = j.at("palette_preset").get<std::string>();
  m.grid = j.at("grid").get<int>();
  m.scale = j.at("scale").get<double>();
  m.validate();
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& dataset_dir) {
  return manifest_from_json(load_json_file(dataset_dir / "manifest.json"));
}

std::filesystem::path split_dir(const std::filesystem::path& dataset_dir,
                                const std::string& split) {
  if (split != "train" && split != "val" && split != "test")
    throw ConfigError("unknown split '" + split + "'");
  return dataset_dir / "splits" / split;
}

std::vector<SceneRecord> load_split(const std::filesystem::path& dataset_dir,
                                    const std::string& split, std::optional<int> limit) {
  auto dir = split_dir(dataset_dir, split);
  if (!std::filesystem::exists(dir)) throw DataError("missing split directory " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (limit && static_cast<int>(files.size()) > *limit) files.resize(*limit);
  std::vector<SceneRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) {
    auto [layout, arch] = scene_record_from_json(load_json_file(f));
    records.push_back({std::move(layout), std::move(arch)});
  }
  if (records.empty()) throw DataError("split '" + split + "' is empty");
  return records;
}

}  // namespace semscene
