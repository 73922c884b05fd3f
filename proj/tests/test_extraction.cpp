#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "semscene/extraction.hpp"
#include "semscene/rng.hpp"
#include "semscene/synth.hpp"

using namespace semscene;

namespace {

/// Independent oracle: recursive flood fill with an explicit visit stack,
/// counting components and their pixels per category.
std::map<int, std::vector<std::set<size_t>>> flood_fill_oracle(const SemanticMap& map) {
  std::map<int, std::vector<std::set<size_t>>> out;
  std::vector<uint8_t> seen(map.cells.size(), 0);
  for (size_t start = 0; start < map.cells.size(); ++start) {
    int cat = map.cells[start];
    if (cat < kFirstObjectCategory || seen[start]) continue;
    std::set<size_t> comp;
    std::vector<size_t> todo{start};
    seen[start] = 1;
    while (!todo.empty()) {
      size_t p = todo.back();
      todo.pop_back();
      comp.insert(p);
      int r = static_cast<int>(p) / map.width, c = static_cast<int>(p) % map.width;
      auto visit = [&](int rr, int cc) {
        if (rr < 0 || rr >= map.height || cc < 0 || cc >= map.width) return;
        size_t q = static_cast<size_t>(rr) * map.width + cc;
        if (!seen[q] && map.cells[q] == cat) {
          seen[q] = 1;
          todo.push_back(q);
        }
      };
      visit(r - 1, c);
      visit(r + 1, c);
      visit(r, c - 1);
      visit(r, c + 1);
    }
    out[cat].push_back(std::move(comp));
  }
  return out;
}

}  // namespace

TEST_CASE("connectivity fixtures") {
  SemanticMap map(4, 4, 1.0, 12, kFloor);
  map.at(0, 0) = 5;
  map.at(1, 1) = 5;  // diagonal only
  auto comps = connected_components(map, 5);
  CHECK(comps.size() == 2);

  SemanticMap block(5, 5, 1.0, 12, kFloor);
  for (int r = 1; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) block.at(r, c) = 7;
  auto solid = connected_components(block, 7);
  REQUIRE(solid.size() == 1);
  CHECK(solid[0].pixel_count == 9);
  CHECK(solid[0].min_row == 1);
  CHECK(solid[0].max_col == 3);

  CHECK(connected_components(block, 9).empty());
  CHECK_THROWS_AS(connected_components(block, kFloor), CategoryError);
}

TEST_CASE("components are ordered by (min row, min col)") {
  SemanticMap map(6, 6, 1.0, 12, kFloor);
  map.at(4, 1) = 5;
  map.at(0, 3) = 5;
  map.at(2, 0) = 5;
  auto comps = connected_components(map, 5);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0].min_row == 0);
  CHECK(comps[1].min_row == 2);
  CHECK(comps[2].min_row == 4);
}

TEST_CASE("connected components match the flood-fill oracle on random maps") {
  Rng rng(71);
  for (int trial = 0; trial < 1000; ++trial) {
    SemanticMap map(32, 32, 0.125, 12, kVoid);
    // Dense-ish random fill exercises merging and boundaries.
    for (auto& c : map.cells) {
      double u = rng.uniform();
      if (u < 0.35)
        c = kFloor;
      else if (u < 0.65)
        c = static_cast<uint8_t>(kFirstObjectCategory + rng.uniform_int(3));
    }
    auto oracle = flood_fill_oracle(map);
    for (int cat = kFirstObjectCategory; cat < kFirstObjectCategory + 3; ++cat) {
      auto comps = connected_components(map, cat);
      size_t expected = oracle.count(cat) ? oracle[cat].size() : 0;
      REQUIRE(comps.size() == expected);
      std::multiset<int> sizes_a, sizes_b;
      for (const auto& m : comps) sizes_a.insert(m.pixel_count);
      if (oracle.count(cat))
        for (const auto& s : oracle[cat]) sizes_b.insert(static_cast<int>(s.size()));
      CHECK(sizes_a == sizes_b);
    }
  }
}

TEST_CASE("threshold computation") {
  SceneRecord rec;
  rec.layout.map = SemanticMap(10, 10, 1.0, 12, kVoid);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) rec.layout.map.at(r, c) = kFloor;
  rec.layout.map.at(2, 2) = 5;
  rec.layout.map.at(2, 3) = 5;
  rec.layout.map.at(3, 2) = 5;
  rec.layout.map.at(3, 3) = 5;
  rec.arch = arch_mask_from_map(rec.layout.map);

  ThresholdTable table = compute_thresholds({rec});
  CHECK(table.threshold_for(5) == doctest::Approx(0.04));
  CHECK(table.threshold_for(9) == doctest::Approx(kFallbackThreshold));

  CHECK_THROWS_AS(compute_thresholds({}), DataError);

  // Minimum over synthetic scenes agrees with a brute-force recomputation.
  GrammarConfig grammar;
  Rng rng(3);
  std::vector<SceneRecord> corpus;
  for (int i = 0; i < 15; ++i) {
    Rng sr = rng.derive(i + 1);
    corpus.push_back(generate_scene(grammar, static_cast<RoomType>(i % 3), sr));
  }
  ThresholdTable computed = compute_thresholds(corpus);
  std::map<int, double> brute;
  for (const auto& r : corpus) {
    int room = room_pixel_count(r.layout.map);
    auto oracle = flood_fill_oracle(r.layout.map);
    for (const auto& [cat, comps] : oracle)
      for (const auto& comp : comps) {
        double ratio = static_cast<double>(comp.size()) / room;
        auto it = brute.find(cat);
        if (it == brute.end() || ratio < it->second) brute[cat] = ratio;
      }
  }
  REQUIRE(computed.ratios.size() == brute.size());
  for (const auto& [cat, ratio] : brute)
    CHECK(computed.threshold_for(cat) == doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("extraction keeps above-threshold instances with exact geometry") {
  SemanticMap map(16, 16, 0.25, 12, kVoid);
  for (int r = 1; r < 15; ++r)
    for (int c = 1; c < 15; ++c) map.at(r, c) = kFloor;
  // One 3x4 object and one single-pixel speck of the same category.
  for (int r = 4; r < 7; ++r)
    for (int c = 5; c < 9; ++c) map.at(r, c) = 6;
  map.at(12, 12) = 6;

  ThresholdTable table;
  table.ratios[6] = 0.02;  // 12/196 passes, 1/196 fails
  auto instances = extract_instances(map, table);
  REQUIRE(instances.size() == 1);
  CHECK(instances[0].mask.category == 6);
  CHECK(instances[0].mask.pixel_count == 12);
  CHECK(instances[0].footprint_w == doctest::Approx(4 * 0.25));
  CHECK(instances[0].footprint_l == doctest::Approx(3 * 0.25));
  CHECK(instances[0].center.x == doctest::Approx((5 + 8 + 1) * 0.5 * 0.25));
  CHECK(instances[0].center.z == doctest::Approx((4 + 6 + 1) * 0.5 * 0.25));
}

TEST_CASE("hand-built fixtures with known instance counts and footprints") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    SemanticMap map(20, 20, 0.5, 12, kVoid);
    for (int r = 0; r < 20; ++r)
      for (int c = 0; c < 20; ++c) map.at(r, c) = kFloor;
    // Distinct-category rectangles cannot merge; geometry is exact.
    struct Rect {
      int cat, r0, c0, h, w;
    };
    std::vector<Rect> rects;
    int cat = kFirstObjectCategory;
    for (int i = 0; i < 4 && cat < 12; ++i, ++cat) {
      Rect rect{cat, static_cast<int>(rng.uniform_int(14)), static_cast<int>(rng.uniform_int(14)),
                2 + static_cast<int>(rng.uniform_int(4)), 2 + static_cast<int>(rng.uniform_int(4))};
      rects.push_back(rect);
      for (int r = rect.r0; r < rect.r0 + rect.h; ++r)
        for (int c = rect.c0; c < rect.c0 + rect.w; ++c) map.at(r, c) = static_cast<uint8_t>(cat);
    }
    ThresholdTable table;  // fallback passes everything here
    auto instances = extract_instances(map, table);
    REQUIRE(instances.size() == rects.size());
    for (const auto& rect : rects) {
      bool found = false;
      for (const auto& inst : instances) {
        if (inst.mask.category != rect.cat) continue;
        found = true;
        CHECK(inst.footprint_w == doctest::Approx(rect.w * 0.5));
        CHECK(inst.footprint_l == doctest::Approx(rect.h * 0.5));
        CHECK(inst.center.x == doctest::Approx((2 * rect.c0 + rect.w) * 0.5 * 0.5));
        CHECK(inst.center.z == doctest::Approx((2 * rect.r0 + rect.h) * 0.5 * 0.5));
      }
      CHECK(found);
    }
  }
}

TEST_CASE("extracted masks are disjoint subsets of object pixels") {
  GrammarConfig grammar;
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    Rng sr = rng.derive(i + 1);
    SceneRecord rec = generate_scene(grammar, static_cast<RoomType>(i % 3), sr);
    ThresholdTable table;
    auto instances = extract_instances(rec.layout.map, table);
    std::vector<int> covered(rec.layout.map.cells.size(), 0);
    for (const auto& inst : instances)
      for (size_t p = 0; p < inst.mask.cells.size(); ++p)
        if (inst.mask.cells[p]) {
          CHECK(rec.layout.map.cells[p] == inst.mask.category);
          CHECK(covered[p] == 0);
          ++covered[p];
        }
  }
}

TEST_CASE("extraction is invariant under void padding") {
  GrammarConfig grammar;
  grammar.canvas = 24;
  Rng rng(9);
  SceneRecord rec = generate_scene(grammar, RoomType::Dining, rng);
  ThresholdTable table = compute_thresholds({rec});

  auto base = extract_instances(rec.layout.map, table);
  SemanticMap padded = pad_to_canvas(rec.layout.map, 32, 32);
  auto shifted = extract_instances(padded, table);
  REQUIRE(base.size() == shifted.size());
  const double dx = ((32 - 24) / 2) * rec.layout.map.scale;
  for (size_t i = 0; i < base.size(); ++i) {
    CHECK(shifted[i].mask.category == base[i].mask.category);
    CHECK(shifted[i].footprint_w == doctest::Approx(base[i].footprint_w));
    CHECK(shifted[i].footprint_l == doctest::Approx(base[i].footprint_l));
    CHECK(shifted[i].center.x == doctest::Approx(base[i].center.x + dx));
    CHECK(shifted[i].center.z == doctest::Approx(base[i].center.z + dx));
  }
}

TEST_CASE("extraction report JSON carries RLE masks") {
  SemanticMap map(8, 8, 0.5, 12, kFloor);
  map.at(2, 2) = 5;
  map.at(2, 3) = 5;
  ThresholdTable table;
  auto instances = extract_instances(map, table);
  nlohmann::json report = extraction_report_to_json(map, instances);
  CHECK(report.at("instances").size() == 1);
  auto runs = report.at("instances").at(0).at("mask_rle");
  REQUIRE(runs.size() == 1);
  CHECK(runs.at(0).at(0).get<size_t>() == 2 * 8 + 2);
  CHECK(runs.at(0).at(1).get<size_t>() == 2);
}
