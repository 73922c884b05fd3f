#include "semscene/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>

#include "semscene/png_io.hpp"

namespace semscene {

using nlohmann::json;

namespace {

constexpr int kGrammarVersion = 1;

// Desk palette object categories.
constexpr int kBed = 4, kNightstand = 5, kWardrobe = 6, kTable = 7, kChair = 8, kSofa = 9,
              kTvStand = 10, kLamp = 11;

// Wall sides: 0 = N (min z), 1 = E (max x), 2 = S (max z), 3 = W (min x).
// Furniture anchored to a wall faces away from it.
constexpr int kFaceAwayFromWall[4] = {0, 3, 2, 1};

struct SizeRange {
  double lo, hi;
  double draw(Rng& rng) const { return rng.uniform(lo, hi); }
};

struct WallRun {
  int side = 0;
  int line = 0;    // row (N/S) or column (E/W) of the boundary cells
  int start = 0;   // inclusive, along the wall axis
  int end = 0;     // inclusive
  int length() const { return end - start + 1; }
};

struct Workspace {
  int H = 0, W = 0;
  SemanticMap map;          // room-local, categories
  std::vector<uint8_t> blocked;  // occupancy: non-floor, clearance, objects
  std::vector<ObjectInstance> instances;

  bool is_floor(int r, int c) const {
    return map.in_bounds(r, c) && map.at(r, c) == kFloor;
  }
  bool is_free(int r, int c) const {
    return is_floor(r, c) && !blocked[static_cast<size_t>(r) * W + c];
  }
  void block(int r, int c) {
    if (map.in_bounds(r, c)) blocked[static_cast<size_t>(r) * W + c] = 1;
  }
};

std::vector<WallRun> boundary_runs(const Workspace& ws, int side) {
  std::vector<WallRun> runs;
  const int H = ws.H, W = ws.W;
  auto outside_or_void = [&](int r, int c) {
    return !ws.map.in_bounds(r, c) || ws.map.at(r, c) == kVoid;
  };
  if (side == 0 || side == 2) {
    const int dr = side == 0 ? -1 : 1;
    for (int r = 0; r < H; ++r) {
      int c = 0;
      while (c < W) {
        if (ws.is_floor(r, c) && outside_or_void(r + dr, c)) {
          int start = c;
          while (c < W && ws.is_floor(r, c) && outside_or_void(r + dr, c)) ++c;
          runs.push_back({side, r, start, c - 1});
        } else {
          ++c;
        }
      }
    }
  } else {
    const int dc = side == 1 ? 1 : -1;
    for (int c = 0; c < W; ++c) {
      int r = 0;
      while (r < H) {
        if (ws.is_floor(r, c) && outside_or_void(r, c + dc)) {
          int start = r;
          while (r < H && ws.is_floor(r, c) && outside_or_void(r, c + dc)) ++r;
          runs.push_back({side, c, start, r - 1});
        } else {
          ++r;
        }
      }
    }
  }
  return runs;
}

/// Rectangle in room-local pixels, inclusive bounds.
struct PixelRect {
  int r0, c0, r1, c1;
  int rows() const { return r1 - r0 + 1; }
  int cols() const { return c1 - c0 + 1; }
};

bool rect_free(const Workspace& ws, const PixelRect& rect) {
  if (rect.r0 < 0 || rect.c0 < 0 || rect.r1 >= ws.H || rect.c1 >= ws.W) return false;
  for (int r = rect.r0; r <= rect.r1; ++r)
    for (int c = rect.c0; c <= rect.c1; ++c)
      if (!ws.is_free(r, c)) return false;
  return true;
}

/// 4-adjacency guard: the rectangle must not touch existing cells of the
/// same category, or extraction would merge the instances.
bool touches_same_category(const Workspace& ws, const PixelRect& rect, int category) {
  auto same = [&](int r, int c) {
    return ws.map.in_bounds(r, c) && ws.map.at(r, c) == category;
  };
  for (int c = rect.c0; c <= rect.c1; ++c)
    if (same(rect.r0 - 1, c) || same(rect.r1 + 1, c)) return true;
  for (int r = rect.r0; r <= rect.r1; ++r)
    if (same(r, rect.c0 - 1) || same(r, rect.c1 + 1)) return true;
  return false;
}

void rasterize(Workspace& ws, const PixelRect& rect, int category) {
  for (int r = rect.r0; r <= rect.r1; ++r)
    for (int c = rect.c0; c <= rect.c1; ++c) {
      ws.map.at(r, c) = static_cast<uint8_t>(category);
      ws.block(r, c);
    }
}

ObjectInstance make_instance(const Workspace& ws, const PixelRect& rect, int category,
                             int orientation, double s_y, double p_y) {
  const double scale = ws.map.scale;
  double x_ext = rect.cols() * scale;
  double z_ext = rect.rows() * scale;
  ObjectInstance inst;
  inst.category = category;
  inst.orientation = orientation;
  // Local size un-rotates the world extents.
  inst.size = (orientation & 1) ? Vec3{z_ext, s_y, x_ext} : Vec3{x_ext, s_y, z_ext};
  inst.position = {(rect.c0 + rect.c1 + 1) * 0.5 * scale, p_y, (rect.r0 + rect.r1 + 1) * 0.5 * scale};
  return inst;
}

int px(double meters, double scale) {
  return std::max(1, static_cast<int>(std::llround(meters / scale)));
}

/// Tries to place a wall-anchored object on the given side. Returns true on
/// success and fills rect.
bool place_against_wall(Workspace& ws, Rng& rng, int side, int w_px, int l_px, int category,
                        PixelRect& rect, int attempts = 100) {
  auto runs = boundary_runs(ws, side);
  std::erase_if(runs, [&](const WallRun& run) { return run.length() < w_px; });
  if (runs.empty()) return false;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const WallRun& run = runs[rng.uniform_int(runs.size())];
    int offset = static_cast<int>(rng.uniform_int(run.length() - w_px + 1));
    int a = run.start + offset;
    PixelRect r{};
    switch (side) {
      case 0: r = {run.line, a, run.line + l_px - 1, a + w_px - 1}; break;
      case 2: r = {run.line - l_px + 1, a, run.line, a + w_px - 1}; break;
      case 1: r = {a, run.line - l_px + 1, a + w_px - 1, run.line}; break;
      default: r = {a, run.line, a + w_px - 1, run.line + l_px - 1}; break;
    }
    if (!rect_free(ws, r) || touches_same_category(ws, r, category)) continue;
    rect = r;
    return true;
  }
  return false;
}

bool place_anywhere(Workspace& ws, Rng& rng, int rows, int cols, int category, PixelRect& rect,
                    int attempts = 100) {
  for (int attempt = 0; attempt < attempts; ++attempt) {
    int r0 = static_cast<int>(rng.uniform_int(std::max(1, ws.H - rows + 1)));
    int c0 = static_cast<int>(rng.uniform_int(std::max(1, ws.W - cols + 1)));
    PixelRect r{r0, c0, r0 + rows - 1, c0 + cols - 1};
    if (!rect_free(ws, r) || touches_same_category(ws, r, category)) continue;
    rect = r;
    return true;
  }
  return false;
}

int pick_side(Rng& rng, const std::array<double, 4>& weights) {
  return static_cast<int>(rng.categorical(std::span(weights.data(), 4)));
}

/// Lays out the floor, an L-cut, one door, and 1-2 windows. Returns false
/// when the door cannot be placed.
bool build_floor(Workspace& ws, const GrammarConfig& g, Rng& rng, int rh, int rw) {
  ws.H = rh;
  ws.W = rw;
  ws.map = SemanticMap(rh, rw, g.scale, palette_preset(g.palette_preset).K(), kFloor);
  ws.blocked.assign(static_cast<size_t>(rh) * rw, 0);
  ws.instances.clear();

  if (rng.bernoulli(g.l_shape_prob)) {
    int corner = static_cast<int>(rng.uniform_int(4));
    int cut_h = static_cast<int>(std::llround(rh * rng.uniform(0.33, 0.5)));
    int cut_w = static_cast<int>(std::llround(rw * rng.uniform(0.33, 0.5)));
    int r0 = (corner == 0 || corner == 1) ? 0 : rh - cut_h;
    int c0 = (corner == 0 || corner == 2) ? 0 : rw - cut_w;
    for (int r = r0; r < r0 + cut_h; ++r)
      for (int c = c0; c < c0 + cut_w; ++c) ws.map.at(r, c) = kVoid;
  }
  for (size_t p = 0; p < ws.map.cells.size(); ++p)
    if (ws.map.cells[p] != kFloor) ws.blocked[p] = 1;

  // Door: one strip on a random side, with an inward clearance zone.
  const int clear_px = static_cast<int>(std::ceil(g.door_clearance_m / g.scale));
  bool door_placed = false;
  int door_side = -1;
  std::array<int, 4> side_order{0, 1, 2, 3};
  for (int i = 3; i > 0; --i) std::swap(side_order[i], side_order[rng.uniform_int(i + 1)]);
  for (int side : side_order) {
    int width = px(rng.uniform(0.75, 1.0), g.scale);
    auto runs = boundary_runs(ws, side);
    std::erase_if(runs, [&](const WallRun& run) { return run.length() < width + 2; });
    if (runs.empty()) continue;
    const WallRun& run = runs[rng.uniform_int(runs.size())];
    int offset = 1 + static_cast<int>(rng.uniform_int(run.length() - width - 1));
    int a = run.start + offset;
    for (int i = 0; i < width; ++i) {
      int r = (side == 0 || side == 2) ? run.line : a + i;
      int c = (side == 0 || side == 2) ? a + i : run.line;
      ws.map.at(r, c) = kDoor;
      ws.block(r, c);
    }
    // Clearance keeps the doorway approachable.
    for (int depth = 1; depth <= clear_px; ++depth) {
      for (int i = 0; i < width; ++i) {
        int r, c;
        switch (side) {
          case 0: r = run.line + depth; c = a + i; break;
          case 2: r = run.line - depth; c = a + i; break;
          case 1: r = a + i; c = run.line - depth; break;
          default: r = a + i; c = run.line + depth; break;
        }
        ws.block(r, c);
      }
    }
    door_placed = true;
    door_side = side;
    break;
  }
  if (!door_placed) return false;

  int n_windows = 1 + static_cast<int>(rng.uniform_int(2));
  for (int wdx = 0; wdx < n_windows; ++wdx) {
    int side = static_cast<int>(rng.uniform_int(4));
    if (side == door_side) continue;
    int width = px(rng.uniform(1.0, 1.5), g.scale);
    auto runs = boundary_runs(ws, side);
    std::erase_if(runs, [&](const WallRun& run) { return run.length() < width + 2; });
    if (runs.empty()) continue;
    const WallRun& run = runs[rng.uniform_int(runs.size())];
    int offset = 1 + static_cast<int>(rng.uniform_int(run.length() - width - 1));
    int a = run.start + offset;
    for (int i = 0; i < width; ++i) {
      int r = (side == 0 || side == 2) ? run.line : a + i;
      int c = (side == 0 || side == 2) ? a + i : run.line;
      ws.map.at(r, c) = kWindow;
      ws.block(r, c);
    }
  }
  return true;
}

bool populate_bedroom(Workspace& ws, const GrammarConfig& g, Rng& rng) {
  const double s = g.scale;
  int side = pick_side(rng, g.wall_weights);
  int bed_w = px(rng.uniform(1.4, 1.8), s);
  int bed_l = px(rng.uniform(1.9, 2.1), s);
  PixelRect bed{};
  if (!place_against_wall(ws, rng, side, bed_w, bed_l, kBed, bed)) return false;
  rasterize(ws, bed, kBed);
  int bed_orient = kFaceAwayFromWall[side];
  ws.instances.push_back(make_instance(ws, bed, kBed, bed_orient, rng.uniform(0.45, 0.6), 0.0));

  // Nightstands flank the bed on its head wall.
  int n_stands = static_cast<int>(rng.categorical(std::array{0.2, 0.35, 0.45}));
  int placed = 0;
  for (int i = 0; i < 2 && placed < n_stands; ++i) {
    int ns = px(rng.uniform(0.4, 0.6), s);
    PixelRect rect{};
    bool horizontal = side == 0 || side == 2;
    int gap = static_cast<int>(rng.uniform_int(2));  // 0 or 1 px from the bed
    if (horizontal) {
      int c0 = i == 0 ? bed.c0 - ns - gap : bed.c1 + 1 + gap;
      int r0 = side == 0 ? bed.r0 : bed.r1 - ns + 1;
      rect = {r0, c0, r0 + ns - 1, c0 + ns - 1};
    } else {
      int r0 = i == 0 ? bed.r0 - ns - gap : bed.r1 + 1 + gap;
      int c0 = side == 3 ? bed.c0 : bed.c1 - ns + 1;
      rect = {r0, c0, r0 + ns - 1, c0 + ns - 1};
    }
    if (!rect_free(ws, rect) || touches_same_category(ws, rect, kNightstand)) continue;
    rasterize(ws, rect, kNightstand);
    ws.instances.push_back(
        make_instance(ws, rect, kNightstand, bed_orient, rng.uniform(0.45, 0.55), 0.0));
    ++placed;
  }

  if (rng.bernoulli(g.wardrobe_prob)) {
    int wside = static_cast<int>(rng.uniform_int(4));
    if (wside != side) {
      int w = px(rng.uniform(1.0, 1.6), s);
      int l = px(rng.uniform(0.5, 0.65), s);
      PixelRect rect{};
      if (place_against_wall(ws, rng, wside, w, l, kWardrobe, rect)) {
        rasterize(ws, rect, kWardrobe);
        ws.instances.push_back(make_instance(ws, rect, kWardrobe, kFaceAwayFromWall[wside],
                                             rng.uniform(1.9, 2.3), 0.0));
      }
    }
  }
  return true;
}

bool populate_dining(Workspace& ws, const GrammarConfig& g, Rng& rng) {
  const double s = g.scale;
  int chair_px = px(rng.uniform(0.4, 0.55), s);
  int n_chairs = 2 + static_cast<int>(rng.uniform_int(5));

  int tw_min = 2 * chair_px + 2;
  int tw_max = std::min(px(1.8, s), ws.W - 2 * chair_px - 4);
  int td_min = px(0.8, s);
  int td_max = std::min(px(1.2, s), ws.H - 2 * chair_px - 4);
  if (tw_max < tw_min || td_max < td_min) return false;
  int tw = tw_min + static_cast<int>(rng.uniform_int(tw_max - tw_min + 1));
  int td = td_min + static_cast<int>(rng.uniform_int(td_max - td_min + 1));

  PixelRect table{};
  bool table_ok = false;
  for (int attempt = 0; attempt < 100 && !table_ok; ++attempt) {
    int jr = static_cast<int>(rng.uniform_range(-1, 1));
    int jc = static_cast<int>(rng.uniform_range(-1, 1));
    int r0 = (ws.H - td) / 2 + jr;
    int c0 = (ws.W - tw) / 2 + jc;
    PixelRect rect{r0, c0, r0 + td - 1, c0 + tw - 1};
    if (rect_free(ws, rect)) {
      table = rect;
      table_ok = true;
    }
  }
  if (!table_ok) return false;
  rasterize(ws, table, kTable);
  ws.instances.push_back(make_instance(ws, table, kTable, 0, rng.uniform(0.72, 0.78), 0.0));

  // Chair slots: two on north/south, one on east/west; chairs face the table.
  struct Slot {
    PixelRect rect;
    int orient;
  };
  std::vector<Slot> slots;
  int cp = chair_px;
  slots.push_back({{table.r0 - cp, table.c0 + 1, table.r0 - 1, table.c0 + cp}, 0});
  slots.push_back({{table.r0 - cp, table.c1 - cp, table.r0 - 1, table.c1 - 1}, 0});
  slots.push_back({{table.r1 + 1, table.c0 + 1, table.r1 + cp, table.c0 + cp}, 2});
  slots.push_back({{table.r1 + 1, table.c1 - cp, table.r1 + cp, table.c1 - 1}, 2});
  int mid_r = (table.r0 + table.r1 + 1) / 2 - cp / 2;
  slots.push_back({{mid_r, table.c1 + 1, mid_r + cp - 1, table.c1 + cp}, 3});
  slots.push_back({{mid_r, table.c0 - cp, mid_r + cp - 1, table.c0 - 1}, 1});
  // Order: N0, S0, N1, S1, E, W so small counts spread around the table.
  const int order[6] = {0, 2, 1, 3, 4, 5};

  int placed = 0;
  for (int i = 0; i < 6 && placed < n_chairs; ++i) {
    const Slot& slot = slots[order[i]];
    if (!rect_free(ws, slot.rect) || touches_same_category(ws, slot.rect, kChair)) continue;
    rasterize(ws, slot.rect, kChair);
    ws.instances.push_back(
        make_instance(ws, slot.rect, kChair, slot.orient, rng.uniform(0.85, 0.95), 0.0));
    ++placed;
  }
  return placed >= 2;
}

bool populate_living(Workspace& ws, const GrammarConfig& g, Rng& rng) {
  const double s = g.scale;
  int side = pick_side(rng, g.wall_weights);
  int sofa_w = px(rng.uniform(1.6, 2.0), s);
  int sofa_l = px(rng.uniform(0.8, 1.0), s);
  PixelRect sofa{};
  if (!place_against_wall(ws, rng, side, sofa_w, sofa_l, kSofa, sofa)) return false;
  rasterize(ws, sofa, kSofa);
  int sofa_orient = kFaceAwayFromWall[side];
  ws.instances.push_back(
      make_instance(ws, sofa, kSofa, sofa_orient, rng.uniform(0.7, 0.9), 0.0));

  // Coffee table one or two pixels in front of the sofa.
  int ctw = px(rng.uniform(0.8, 1.2), s);
  int ctd = px(rng.uniform(0.5, 0.7), s);
  int gap = 1 + static_cast<int>(rng.uniform_int(2));
  PixelRect ct{};
  bool horizontal = side == 0 || side == 2;
  if (horizontal) {
    int c0 = (sofa.c0 + sofa.c1 + 1) / 2 - ctw / 2;
    int r0 = side == 0 ? sofa.r1 + 1 + gap : sofa.r0 - gap - ctd;
    ct = {r0, c0, r0 + ctd - 1, c0 + ctw - 1};
  } else {
    int r0 = (sofa.r0 + sofa.r1 + 1) / 2 - ctw / 2;
    int c0 = side == 3 ? sofa.c1 + 1 + gap : sofa.c0 - gap - ctd;
    ct = {r0, c0, r0 + ctw - 1, c0 + ctd - 1};
  }
  if (rect_free(ws, ct) && !touches_same_category(ws, ct, kTable)) {
    rasterize(ws, ct, kTable);
    ws.instances.push_back(make_instance(ws, ct, kTable, 0, rng.uniform(0.4, 0.5), 0.0));
  }

  if (rng.bernoulli(g.tv_stand_prob)) {
    int opposite = (side + 2) % 4;
    int w = px(rng.uniform(1.2, 1.6), s);
    int l = px(rng.uniform(0.4, 0.5), s);
    PixelRect rect{};
    if (place_against_wall(ws, rng, opposite, w, l, kTvStand, rect)) {
      rasterize(ws, rect, kTvStand);
      ws.instances.push_back(make_instance(ws, rect, kTvStand, kFaceAwayFromWall[opposite],
                                           rng.uniform(0.4, 0.6), 0.0));
    }
  }
  return true;
}

void place_lamp(Workspace& ws, Rng& rng) {
  int lp = px(rng.uniform(0.4, 0.6), ws.map.scale);
  PixelRect rect{};
  // Prefer a spot near the room centroid, fall back to anywhere free.
  double sum_r = 0.0, sum_c = 0.0;
  long n = 0;
  for (int r = 0; r < ws.H; ++r)
    for (int c = 0; c < ws.W; ++c)
      if (ws.map.at(r, c) != kVoid) {
        sum_r += r;
        sum_c += c;
        ++n;
      }
  bool placed = false;
  if (n > 0) {
    int cr = static_cast<int>(sum_r / n), cc = static_cast<int>(sum_c / n);
    for (int attempt = 0; attempt < 40 && !placed; ++attempt) {
      int r0 = cr - lp / 2 + static_cast<int>(rng.uniform_range(-2, 2));
      int c0 = cc - lp / 2 + static_cast<int>(rng.uniform_range(-2, 2));
      PixelRect r{r0, c0, r0 + lp - 1, c0 + lp - 1};
      if (rect_free(ws, r) && !touches_same_category(ws, r, kLamp)) {
        rect = r;
        placed = true;
      }
    }
  }
  if (!placed && !place_anywhere(ws, rng, lp, lp, kLamp, rect, 60)) return;
  rasterize(ws, rect, kLamp);
  // Rotationally symmetric fixture: the annotated orientation is arbitrary.
  int orient = static_cast<int>(rng.uniform_int(4));
  ws.instances.push_back(
      make_instance(ws, rect, kLamp, orient, rng.uniform(0.25, 0.45), rng.uniform(2.2, 2.5)));
}

}  // namespace

void GrammarConfig::validate() const {
  if (canvas < 16) throw ConfigError("grammar canvas must be at least 16 pixels");
  if (scale <= 0.0) throw ConfigError("grammar scale must be positive");
  double wsum = 0.0;
  for (double w : wall_weights) {
    if (w < 0.0) throw ConfigError("wall weights must be non-negative");
    wsum += w;
  }
  if (wsum <= 0.0) throw ConfigError("wall weights must not all be zero");
}

json GrammarConfig::to_json() const {
  return {{"version", kGrammarVersion},
          {"canvas", canvas},
          {"scale", scale},
          {"palette_preset", palette_preset},
          {"l_shape_prob", l_shape_prob},
          {"wardrobe_prob", wardrobe_prob},
          {"tv_stand_prob", tv_stand_prob},
          {"dining_lamp_prob", dining_lamp_prob},
          {"wall_weights", wall_weights},
          {"door_clearance_m", door_clearance_m}};
}

GrammarConfig GrammarConfig::from_json(const json& j) {
  GrammarConfig g;
  g.canvas = j.at("canvas").get<int>();
  g.scale = j.at("scale").get<double>();
  g.palette_preset = j.at("palette_preset").get<std::string>();
  g.l_shape_prob = j.at("l_shape_prob").get<double>();
  g.wardrobe_prob = j.at("wardrobe_prob").get<double>();
  g.tv_stand_prob = j.at("tv_stand_prob").get<double>();
  g.dining_lamp_prob = j.at("dining_lamp_prob").get<double>();
  g.wall_weights = j.at("wall_weights").get<std::array<double, 4>>();
  g.door_clearance_m = j.at("door_clearance_m").get<double>();
  g.validate();
  return g;
}

uint64_t GrammarConfig::hash() const {
  std::string dump = to_json().dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : dump) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

SceneRecord generate_scene(const GrammarConfig& grammar, RoomType room_type, Rng& rng) {
  grammar.validate();
  if (grammar.palette_preset != "desk")
    throw ConfigError("the room grammar currently emits the desk palette categories");
  const double s = grammar.scale;
  const double canvas_m = grammar.canvas * s;
  const double side_max = canvas_m - 2 * s;
  const double side_min = std::min(room_type == RoomType::Dining ? 2.8 : 3.0, side_max - 0.25);

  for (int floor_attempt = 0; floor_attempt < 10; ++floor_attempt) {
    Workspace ws;
    int rh = px(rng.uniform(side_min, side_max), s);
    int rw = px(rng.uniform(side_min, side_max), s);
    rh = std::min(rh, grammar.canvas - 2);
    rw = std::min(rw, grammar.canvas - 2);
    if (!build_floor(ws, grammar, rng, rh, rw)) continue;

    bool ok = false;
    switch (room_type) {
      case RoomType::Bedroom: ok = populate_bedroom(ws, grammar, rng); break;
      case RoomType::Dining: ok = populate_dining(ws, grammar, rng); break;
      case RoomType::Living: ok = populate_living(ws, grammar, rng); break;
    }
    if (!ok) continue;

    bool wants_lamp = room_type != RoomType::Dining || rng.bernoulli(grammar.dining_lamp_prob);
    if (wants_lamp) place_lamp(ws, rng);

    SceneRecord record;
    record.layout.room_type = static_cast<int>(room_type);
    record.layout.map = pad_to_canvas(ws.map, grammar.canvas, grammar.canvas);
    const double off_x = ((grammar.canvas - ws.W) / 2) * s;
    const double off_z = ((grammar.canvas - ws.H) / 2) * s;
    for (auto inst : ws.instances) {
      inst.position.x += off_x;
      inst.position.z += off_z;
      record.layout.instances.push_back(inst);
    }
    record.arch = arch_mask_from_map(record.layout.map);
    record.layout.validate();
    return record;
  }
  throw DataError("generate_scene: no valid floor after 10 attempts");
}

DatasetManifest build_dataset(const std::filesystem::path& out_dir,
                              const BuildDatasetConfig& cfg) {
  if (cfg.scenes < 1) throw ConfigError("build_dataset: scene count must be positive");
  if (std::fabs(cfg.ratio_train + cfg.ratio_val + cfg.ratio_test - 1.0) > 1e-9)
    throw ConfigError("build_dataset: split ratios must sum to 1");
  cfg.grammar.validate();
  CategoryPalette palette = palette_preset(cfg.grammar.palette_preset);

  const int n_train = static_cast<int>(std::llround(cfg.scenes * cfg.ratio_train));
  const int n_val = static_cast<int>(std::llround(cfg.scenes * cfg.ratio_val));
  const int n_test = cfg.scenes - n_train - n_val;
  if (n_train < 1 || n_test < 0 || n_val < 0)
    throw ConfigError("build_dataset: split sizes degenerate for this scene count");

  std::filesystem::create_directories(out_dir);
  for (const char* split : {"train", "val", "test"})
    std::filesystem::create_directories(out_dir / "splits" / split);

  Rng base(cfg.seed);
  char name[64];
  for (int i = 0; i < cfg.scenes; ++i) {
    Rng scene_rng = base.derive(static_cast<uint64_t>(i) + 1);
    RoomType type = static_cast<RoomType>(i % kRoomTypeCount);
    SceneRecord record = generate_scene(cfg.grammar, type, scene_rng);
    const char* split = i < n_train ? "train" : (i < n_train + n_val ? "val" : "test");
    std::snprintf(name, sizeof(name), "scene_%06d", i);
    auto dir = out_dir / "splits" / split;
    save_json_file(dir / (std::string(name) + ".json"),
                   scene_record_to_json(record.layout, record.arch));
    write_map_png(dir / (std::string(name) + ".png"), record.layout.map, palette);
  }

  DatasetManifest manifest;
  manifest.seed = cfg.seed;
  manifest.count_train = n_train;
  manifest.count_val = n_val;
  manifest.count_test = n_test;
  manifest.ratio_train = cfg.ratio_train;
  manifest.ratio_val = cfg.ratio_val;
  manifest.ratio_test = cfg.ratio_test;
  manifest.palette_hash = palette.hash();
  manifest.grammar_hash = cfg.grammar.hash();
  manifest.palette_preset = cfg.grammar.palette_preset;
  manifest.grid = cfg.grammar.canvas;
  manifest.scale = cfg.grammar.scale;
  manifest.validate();
  save_json_file(out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

}  // namespace semscene
