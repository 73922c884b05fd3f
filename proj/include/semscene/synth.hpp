#pragma once

#include "semscene/dataset.hpp"
#include "semscene/rng.hpp"

namespace semscene {

/// Room grammar parameters. Object size tables and placement rules live in
/// the generator; the config controls canvas, palette, and mixture knobs.
struct GrammarConfig {
  int canvas = 32;       // square canvas, pixels
  double scale = 0.125;  // meters per pixel
  std::string palette_preset = "desk";
  double l_shape_prob = 0.3;
  double wardrobe_prob = 0.55;
  double tv_stand_prob = 0.7;
  double dining_lamp_prob = 0.8;
  // Wall-side weights (N, E, S, W) for wall-anchored furniture; the skew
  // makes the majority-orientation baseline strictly better than chance.
  std::array<double, 4> wall_weights{0.15, 0.25, 0.4, 0.2};
  double door_clearance_m = 0.5;

  void validate() const;
  nlohmann::json to_json() const;
  static GrammarConfig from_json(const nlohmann::json& j);
  uint64_t hash() const;
};

/// Generates one scene: rasterized semantic map, arch mask, and per-instance
/// ground-truth attributes. Placement rejects overlaps; a mandatory object
/// that cannot be placed after 100 attempts triggers a fresh floor, and ten
/// failed floors are a hard error.
SceneRecord generate_scene(const GrammarConfig& grammar, RoomType room_type, Rng& rng);

struct BuildDatasetConfig {
  GrammarConfig grammar;
  int scenes = 2000;
  double ratio_train = 0.7;
  double ratio_val = 0.1;
  double ratio_test = 0.2;
  uint64_t seed = 1;
};

/// Writes manifest.json plus splits/{train,val,test}/scene_%06d.{png,json}.
/// Room types cycle deterministically; byte-identical per seed.
DatasetManifest build_dataset(const std::filesystem::path& out_dir,
                              const BuildDatasetConfig& cfg);

}  // namespace semscene
