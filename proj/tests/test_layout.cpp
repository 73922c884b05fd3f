#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "semscene/json_io.hpp"
#include "semscene/png_io.hpp"
#include "semscene/rng.hpp"

using namespace semscene;

TEST_CASE("palette presets and invariants") {
  CategoryPalette desk = desk_palette();
  CHECK(desk.K() == 12);
  CHECK(desk.name(kVoid) == "void");
  CHECK(desk.name(kFloor) == "floor");
  CHECK(desk.name(kDoor) == "door");
  CHECK(desk.name(kWindow) == "window");
  CHECK(desk.object_category_count() == 8);

  CategoryPalette paper = paper_palette();
  CHECK(paper.K() == 38);
  CHECK(paper.object_category_count() == 34);
  CHECK(paper.hash() != desk.hash());

  CHECK_THROWS_AS(CategoryPalette({"void", "floor", "door", "window", "a", "a"}), ConfigError);
  CHECK_THROWS_AS(CategoryPalette({"floor", "void", "door", "window", "a"}), ConfigError);
  CHECK_THROWS_AS(palette_preset("nope"), ConfigError);
}

TEST_CASE("pad_to_canvas centers content on void") {
  SemanticMap small(2, 2, 1.0, 5, kFloor);
  SemanticMap same = pad_to_canvas(small, 2, 2);
  CHECK(same == small);

  SemanticMap padded = pad_to_canvas(small, 4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      bool interior = r >= 1 && r <= 2 && c >= 1 && c <= 2;
      CHECK(padded.at(r, c) == (interior ? kFloor : kVoid));
    }
  CHECK(padded.scale == small.scale);

  CHECK_THROWS_AS(pad_to_canvas(padded, 2, 2), ShapeError);

  // Paper-scale canvas: 1200 px at 0.01 m/px spans 12 m.
  SemanticMap paper_canvas(1200, 1200, 0.01, 38);
  CHECK(paper_canvas.height * paper_canvas.scale == doctest::Approx(12.0));
}

TEST_CASE("pad_to_canvas preserves the non-void multiset") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    SemanticMap map(5 + rng.uniform_int(6), 5 + rng.uniform_int(6), 0.5, 9);
    for (auto& c : map.cells) c = static_cast<uint8_t>(rng.uniform_int(9));
    SemanticMap padded = pad_to_canvas(map, map.height + rng.uniform_int(5),
                                       map.width + rng.uniform_int(5));
    std::array<long, 9> before{}, after{};
    for (uint8_t c : map.cells)
      if (c != kVoid) ++before[c];
    for (uint8_t c : padded.cells)
      if (c != kVoid) ++after[c];
    CHECK(before == after);
  }
}

TEST_CASE("pixel/world round trip uses pixel centers") {
  SemanticMap map(100, 100, 0.01, 5);
  WorldXZ origin = pixel_to_world(0, 0, map);
  CHECK(origin.x == doctest::Approx(0.005));
  CHECK(origin.z == doctest::Approx(0.005));

  WorldXZ deep = pixel_to_world(99, 0, map);
  CHECK(deep.x == doctest::Approx(0.005));
  CHECK(deep.z == doctest::Approx(0.995));

  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    int r = static_cast<int>(rng.uniform_int(100));
    int c = static_cast<int>(rng.uniform_int(100));
    WorldXZ w = pixel_to_world(r, c, map);
    auto [rr, cc] = world_to_pixel(w.x, w.z, map);
    CHECK(rr == r);
    CHECK(cc == c);
  }
  CHECK_THROWS_AS(pixel_to_world(100, 0, map), IndexError);
  CHECK_THROWS_AS(world_to_pixel(-0.01, 0.5, map), IndexError);
}

TEST_CASE("one_hot expands and argmax inverts") {
  SemanticMap map(1, 1, 1.0, 5);
  map.at(0, 0) = 2;
  CategoricalGrid grid = one_hot(map, 4);
  CHECK(grid.at(0, 0, 0) == 0.0);
  CHECK(grid.at(0, 0, 1) == 0.0);
  CHECK(grid.at(0, 0, 2) == 1.0);
  CHECK(grid.at(0, 0, 3) == 0.0);

  SemanticMap all_void(3, 3, 1.0, 5);
  CategoricalGrid void_grid = one_hot(all_void, 5);
  for (size_t p = 0; p < void_grid.pixel_count(); ++p) {
    CHECK(void_grid.pixel(p)[0] == 1.0);
    for (int k = 1; k < 5; ++k) CHECK(void_grid.pixel(p)[k] == 0.0);
  }

  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    SemanticMap random_map(8, 8, 0.5, 6);
    for (auto& c : random_map.cells) c = static_cast<uint8_t>(rng.uniform_int(6));
    SemanticMap back = argmax_map(one_hot(random_map, 6), random_map.scale);
    CHECK(back.cells == random_map.cells);
  }

  SemanticMap bad(1, 1, 1.0, 9);
  bad.at(0, 0) = 8;
  CHECK_THROWS_AS(one_hot(bad, 4), CategoryError);
}

TEST_CASE("condition spec invariants") {
  ArchMask mask(2, 2, 0);
  mask.at(0, 0) = kFloor;

  ConditionSpec none{ConditionKind::None, ArchMask(2, 2, 0), 0};
  CHECK_NOTHROW(none.validate());
  ConditionSpec bad_none{ConditionKind::None, mask, 0};
  CHECK_THROWS_AS(bad_none.validate(), ConfigError);

  ArchMask arch(2, 2, 0);
  arch.at(0, 0) = kFloor;
  arch.at(0, 1) = kDoor;
  ConditionSpec bad_floor{ConditionKind::Floor, arch, 0};
  CHECK_THROWS_AS(bad_floor.validate(), ConfigError);
  ConditionSpec good_arch{ConditionKind::Arch, arch, 1};
  CHECK_NOTHROW(good_arch.validate());

  ConditionSpec no_floor{ConditionKind::Floor, ArchMask(2, 2, 0), 0};
  CHECK_THROWS_AS(no_floor.validate(), ConfigError);
}

TEST_CASE("mask derivations") {
  SemanticMap map(2, 3, 1.0, 12);
  map.at(0, 0) = kFloor;
  map.at(0, 1) = 7;  // object collapses to floor
  map.at(0, 2) = kWindow;
  map.at(1, 0) = kDoor;
  ArchMask arch = arch_mask_from_map(map);
  CHECK(arch.at(0, 0) == kFloor);
  CHECK(arch.at(0, 1) == kFloor);
  CHECK(arch.at(0, 2) == kWindow);
  CHECK(arch.at(1, 0) == kDoor);
  CHECK(arch.at(1, 1) == kVoid);

  ArchMask floor = floor_mask_from_arch(arch);
  CHECK(floor.at(0, 2) == 1);
  CHECK(floor.at(1, 0) == 1);
  CHECK(floor.at(1, 1) == 0);

  ConditionSpec cond = make_condition(ConditionKind::None, arch, 2);
  CHECK(cond.mask.cells == std::vector<uint8_t>(6, 0));
  cond = make_condition(ConditionKind::Floor, arch, 2);
  CHECK_NOTHROW(cond.validate());
}

TEST_CASE("map JSON and PNG round trips") {
  Rng rng(23);
  SemanticMap map(16, 9, 0.125, 12);
  for (auto& c : map.cells) c = static_cast<uint8_t>(rng.uniform_int(12));

  nlohmann::json j = map_to_json(map);
  SemanticMap back = map_from_json(j);
  CHECK(back == map);

  auto tmp = std::filesystem::temp_directory_path() / "semscene_layout_test";
  std::filesystem::create_directories(tmp);
  write_map_png(tmp / "m.png", map, desk_palette());
  SemanticMap png_back = read_map_png(tmp / "m.png", map.scale, map.K);
  CHECK(png_back == map);
}

TEST_CASE("scene layout validation") {
  SceneLayout layout;
  layout.map = SemanticMap(4, 4, 0.5, 12, kFloor);
  layout.map.at(1, 1) = 7;
  ObjectInstance inst;
  inst.category = 7;
  inst.size = {0.5, 0.5, 0.5};
  inst.position = {0.75, 0.0, 0.75};
  layout.instances.push_back(inst);
  CHECK_NOTHROW(layout.validate());

  layout.instances[0].category = 9;  // not rasterized anywhere
  CHECK_THROWS_AS(layout.validate(), InstanceError);
  layout.instances[0].category = 7;
  layout.instances[0].size.y = -1.0;
  CHECK_THROWS_AS(layout.validate(), InstanceError);
}
