#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "semscene/assembly.hpp"
#include "semscene/commands.hpp"
#include "semscene/metrics.hpp"
#include "semscene/synth.hpp"

using namespace semscene;

namespace {

std::vector<SceneRecord> corpus_of(int n, uint64_t seed, const GrammarConfig& g = {}) {
  Rng rng(seed);
  std::vector<SceneRecord> out;
  for (int i = 0; i < n; ++i) {
    Rng sr = rng.derive(i + 1);
    out.push_back(generate_scene(g, static_cast<RoomType>(i % 3), sr));
  }
  return out;
}

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("generated scenes are clean: no out-of-bounds, no collisions") {
  for (const auto& rec : corpus_of(60, 101)) {
    Scene3D scene = scene_from_ground_truth(rec);
    OobResult o = oob(scene);
    CHECK(o.oob_object_ratio == 0.0);
    CHECK_FALSE(o.scene_flag);
    CHECK(collision_rate(scene) == 0.0);
    CHECK(navigability(scene) > 0.0);
  }
}

TEST_CASE("grammar guarantees per room type") {
  auto corpus = corpus_of(90, 7);
  for (const auto& rec : corpus) {
    std::map<int, int> counts;
    for (const auto& inst : rec.layout.instances) ++counts[inst.category];
    switch (static_cast<RoomType>(rec.layout.room_type)) {
      case RoomType::Bedroom:
        CHECK(counts[4] == 1);        // exactly one bed
        CHECK(counts[5] <= 2);        // at most two nightstands
        break;
      case RoomType::Dining:
        CHECK(counts[7] == 1);        // one table
        CHECK(counts[8] >= 2);        // chairs around it
        CHECK(counts[8] <= 6);
        break;
      case RoomType::Living:
        CHECK(counts[9] == 1);        // one sofa
        break;
    }
    rec.layout.validate();
  }
}

TEST_CASE("doors stay approachable") {
  GrammarConfig g;
  const int clear_px = static_cast<int>(std::ceil(g.door_clearance_m / g.scale));
  for (const auto& rec : corpus_of(45, 13, g)) {
    const auto& map = rec.layout.map;
    for (int r = 0; r < map.height; ++r) {
      for (int c = 0; c < map.width; ++c) {
        if (map.at(r, c) != kDoor) continue;
        // The inward neighbor chain of each door cell must be object-free.
        const int dr[4] = {-1, 1, 0, 0};
        const int dc[4] = {0, 0, -1, 1};
        for (int dir = 0; dir < 4; ++dir) {
          int rr = r + dr[dir], cc = c + dc[dir];
          if (!map.in_bounds(rr, cc) || map.at(rr, cc) != kFloor) continue;
          // Walk inward as far as clearance demands.
          for (int depth = 0; depth < clear_px; ++depth) {
            if (!map.in_bounds(rr, cc)) break;
            CHECK(map.at(rr, cc) < kFirstObjectCategory);
            rr += dr[dir];
            cc += dc[dir];
          }
        }
      }
    }
  }
}

TEST_CASE("rasterize -> extract round trip recovers every instance") {
  auto corpus = corpus_of(60, 31);
  ThresholdTable thresholds = compute_thresholds(corpus);
  for (const auto& rec : corpus) {
    auto instances = extract_instances(rec.layout.map, thresholds);
    CHECK(instances.size() == rec.layout.instances.size());
    std::map<int, int> want, got;
    for (const auto& inst : rec.layout.instances) ++want[inst.category];
    for (const auto& inst : instances) ++got[inst.mask.category];
    CHECK(want == got);
  }
}

TEST_CASE("per-room-type instance rates match the grammar parameters") {
  GrammarConfig g;
  auto corpus = corpus_of(3000, 97, g);
  std::array<long, 3> scenes{};
  std::map<std::pair<int, int>, long> counts;  // (room_type, category) -> n
  for (const auto& rec : corpus) {
    ++scenes[rec.layout.room_type];
    for (const auto& inst : rec.layout.instances)
      ++counts[{rec.layout.room_type, inst.category}];
  }
  auto rate = [&](RoomType type, int cat) {
    return static_cast<double>(counts[{static_cast<int>(type), cat}]) /
           scenes[static_cast<int>(type)];
  };
  CHECK(rate(RoomType::Bedroom, 4) == 1.0);                         // bed always
  CHECK(rate(RoomType::Bedroom, 5) == doctest::Approx(1.25).epsilon(0.08));
  CHECK(rate(RoomType::Bedroom, 6) ==
        doctest::Approx(g.wardrobe_prob * 0.75).epsilon(0.12));     // side re-roll skips 1/4
  CHECK(rate(RoomType::Living, 9) == 1.0);                          // sofa always
  CHECK(rate(RoomType::Living, 10) == doctest::Approx(g.tv_stand_prob).epsilon(0.08));
  CHECK(rate(RoomType::Dining, 7) == 1.0);                          // table always
  CHECK(rate(RoomType::Dining, 8) >= 2.0);
  CHECK(rate(RoomType::Dining, 11) == doctest::Approx(g.dining_lamp_prob).epsilon(0.08));
  CHECK(rate(RoomType::Bedroom, 11) == doctest::Approx(1.0).epsilon(0.02));

  // Orientation skew: the majority wall (south) dominates bed orientations.
  std::array<long, 4> bed_orients{};
  for (const auto& rec : corpus)
    for (const auto& inst : rec.layout.instances)
      if (inst.category == 4) ++bed_orients[inst.orientation];
  long total_beds = bed_orients[0] + bed_orients[1] + bed_orients[2] + bed_orients[3];
  // South wall (weight 0.4) means facing -z, class 2.
  CHECK(static_cast<double>(bed_orients[2]) / total_beds > 0.3);
  CHECK(static_cast<double>(bed_orients[2]) / total_beds ==
        doctest::Approx(0.4).epsilon(0.15));
}

TEST_CASE("category frequencies are stable across independent corpora") {
  auto freq = [](const std::vector<SceneRecord>& corpus) {
    CategoryHistogram h;
    for (const auto& rec : corpus)
      for (const auto& inst : rec.layout.instances) h.add(inst.category);
    return h.frequencies();
  };
  auto f1 = freq(corpus_of(2500, 111));
  auto f2 = freq(corpus_of(2500, 222));
  double l1 = 0.0;
  for (int cat = kFirstObjectCategory; cat < 12; ++cat) {
    double a = f1.count(cat) ? f1[cat] : 0.0;
    double b = f2.count(cat) ? f2[cat] : 0.0;
    l1 += std::fabs(a - b);
  }
  CHECK(l1 < 0.02);
}

TEST_CASE("build_dataset splits, determinism, and manifest") {
  auto tmp = std::filesystem::temp_directory_path() / "semscene_synth_test";
  std::filesystem::remove_all(tmp);

  BuildDatasetConfig cfg;
  cfg.scenes = 60;
  cfg.seed = 77;
  cfg.grammar.canvas = 32;
  DatasetManifest manifest = build_dataset(tmp / "a", cfg);
  CHECK(manifest.count_train == 42);
  CHECK(manifest.count_val == 6);
  CHECK(manifest.count_test == 12);
  CHECK(manifest.palette_hash == desk_palette().hash());

  build_dataset(tmp / "b", cfg);
  for (const char* split : {"train", "val", "test"}) {
    for (const auto& entry :
         std::filesystem::directory_iterator(tmp / "a" / "splits" / split)) {
      auto rel = entry.path().filename();
      CHECK(file_bytes(entry.path()) == file_bytes(tmp / "b" / "splits" / split / rel));
    }
  }

  auto records = load_split(tmp / "a", "train");
  CHECK(static_cast<int>(records.size()) == 42);
  records[0].layout.validate();

  // 1000-scene split arithmetic: 700/100/200.
  BuildDatasetConfig big;
  big.scenes = 1000;
  big.seed = 5;
  DatasetManifest bigm = build_dataset(tmp / "c", big);
  CHECK(bigm.count_train == 700);
  CHECK(bigm.count_val == 100);
  CHECK(bigm.count_test == 200);
}

TEST_CASE("gt arch mask stored in records matches the map-derived mask") {
  auto tmp = std::filesystem::temp_directory_path() / "semscene_synth_mask";
  std::filesystem::remove_all(tmp);
  BuildDatasetConfig cfg;
  cfg.scenes = 12;
  cfg.seed = 3;
  build_dataset(tmp, cfg);
  for (const auto& rec : load_split(tmp, "train"))
    CHECK(rec.arch.cells == arch_mask_from_map(rec.layout.map).cells);
}

TEST_CASE("grammar config hash tracks parameter changes") {
  GrammarConfig a, b;
  CHECK(a.hash() == b.hash());
  b.l_shape_prob = 0.31;
  CHECK(a.hash() != b.hash());
  GrammarConfig c = GrammarConfig::from_json(a.to_json());
  CHECK(c.hash() == a.hash());
}
