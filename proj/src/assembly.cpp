#include "semscene/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

namespace semscene {

using nlohmann::json;

void AssetCatalog::validate() const {
  std::map<std::string, int> seen;
  for (const auto& a : assets) {
    if (a.size.x <= 0 || a.size.y <= 0 || a.size.z <= 0)
      throw ConfigError("catalog asset '" + a.id + "' has non-positive size");
    if (++seen[a.id] > 1) throw ConfigError("duplicate catalog asset id '" + a.id + "'");
  }
}

const Asset* AssetCatalog::find(const std::string& id) const {
  for (const auto& a : assets)
    if (a.id == id) return &a;
  return nullptr;
}

json catalog_to_json(const AssetCatalog& catalog) {
  json j;
  j["version"] = 1;
  json list = json::array();
  for (const auto& a : catalog.assets)
    list.push_back({{"id", a.id},
                    {"category", a.category},
                    {"size", {a.size.x, a.size.y, a.size.z}}});
  j["assets"] = list;
  return j;
}

AssetCatalog catalog_from_json(const json& j) {
  AssetCatalog catalog;
  for (const auto& ja : j.at("assets")) {
    Asset a;
    a.id = ja.at("id").get<std::string>();
    a.category = ja.at("category").get<int>();
    auto s = ja.at("size");
    a.size = {s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()};
    catalog.assets.push_back(std::move(a));
  }
  catalog.validate();
  return catalog;
}

AssetCatalog catalog_from_records(const std::vector<SceneRecord>& records,
                                  const CategoryPalette& palette) {
  auto quant = [](double v) { return std::llround(v * 1000.0); };
  std::map<int, std::vector<std::array<long long, 3>>> sizes;
  for (const auto& rec : records)
    for (const auto& inst : rec.layout.instances)
      sizes[inst.category].push_back({quant(inst.size.x), quant(inst.size.y), quant(inst.size.z)});

  AssetCatalog catalog;
  for (auto& [cat, list] : sizes) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    int serial = 0;
    for (const auto& q : list) {
      Asset a;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "_%05d", serial++);
      a.id = palette.name(cat) + buf;
      a.category = cat;
      a.size = {q[0] / 1000.0, q[1] / 1000.0, q[2] / 1000.0};
      catalog.assets.push_back(std::move(a));
    }
  }
  catalog.validate();
  return catalog;
}

const Asset& retrieve_asset(const AssetCatalog& catalog, int category,
                            const Vec3& predicted_size) {
  const Asset* best = nullptr;
  double best_mse = 0.0;
  for (const auto& a : catalog.assets) {
    if (a.category != category) continue;
    double dx = predicted_size.x - a.size.x;
    double dy = predicted_size.y - a.size.y;
    double dz = predicted_size.z - a.size.z;
    double mse = (dx * dx + dy * dy + dz * dz) / 3.0;
    if (!best || mse < best_mse || (mse == best_mse && a.id < best->id)) {
      best = &a;
      best_mse = mse;
    }
  }
  if (!best)
    throw RetrievalError("no catalog assets for category " + std::to_string(category));
  return *best;
}

// --- Floor polygon tracing -------------------------------------------------

namespace {

// Directions in (x, z): E, S, W, N.
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDz[4] = {0, 1, 0, -1};

struct RegionGrid {
  int H = 0, W = 0;
  std::vector<uint8_t> in;
  bool at(int r, int c) const {
    return r >= 0 && r < H && c >= 0 && c < W && in[static_cast<size_t>(r) * W + c] != 0;
  }
};

RegionGrid largest_region(int H, int W, const std::vector<uint8_t>& occupied) {
  RegionGrid grid{H, W, std::vector<uint8_t>(static_cast<size_t>(H) * W, 0)};
  std::vector<int> label(static_cast<size_t>(H) * W, -1);
  int best_id = -1, best_size = 0, next = 0;
  std::vector<size_t> stack;
  for (size_t p = 0; p < occupied.size(); ++p) {
    if (!occupied[p] || label[p] != -1) continue;
    int id = next++;
    int size = 0;
    stack.assign(1, p);
    label[p] = id;
    while (!stack.empty()) {
      size_t q = stack.back();
      stack.pop_back();
      ++size;
      int r = static_cast<int>(q) / W, c = static_cast<int>(q) % W;
      const int nr[4] = {r - 1, r + 1, r, r};
      const int nc[4] = {c, c, c - 1, c + 1};
      for (int i = 0; i < 4; ++i) {
        if (nr[i] < 0 || nr[i] >= H || nc[i] < 0 || nc[i] >= W) continue;
        size_t n = static_cast<size_t>(nr[i]) * W + nc[i];
        if (occupied[n] && label[n] == -1) {
          label[n] = id;
          stack.push_back(n);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best_id = id;
    }
  }
  if (best_id < 0) throw GeometryError("mask has no floor pixels");
  for (size_t p = 0; p < occupied.size(); ++p) grid.in[p] = label[p] == best_id ? 1 : 0;
  return grid;
}

Polygon2 trace_outer_boundary(const RegionGrid& region, double scale) {
  const int H = region.H, W = region.W;
  // Outgoing boundary edges per grid corner; at most two (corner id -> dirs).
  const int corner_w = W + 1;
  std::vector<std::array<int8_t, 2>> outgoing(static_cast<size_t>(H + 1) * corner_w, {-1, -1});
  auto add_edge = [&](int r, int c, int dir) {
    auto& slot = outgoing[static_cast<size_t>(r) * corner_w + c];
    if (slot[0] < 0) slot[0] = static_cast<int8_t>(dir);
    else slot[1] = static_cast<int8_t>(dir);
  };
  int start_r = -1, start_c = -1;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      if (!region.at(r, c)) continue;
      if (start_r < 0) {
        start_r = r;
        start_c = c;
      }
      if (!region.at(r - 1, c)) add_edge(r, c, 0);          // top side, heading E
      if (!region.at(r, c + 1)) add_edge(r, c + 1, 1);      // right side, heading S
      if (!region.at(r + 1, c)) add_edge(r + 1, c + 1, 2);  // bottom side, heading W
      if (!region.at(r, c - 1)) add_edge(r + 1, c, 3);      // left side, heading N
    }
  }
  if (start_r < 0) throw GeometryError("empty region");

  // Walk from the topmost-leftmost cell's top-left corner. At crossing
  // corners prefer the turn with cross(d_in, d_out) = -1, which keeps the
  // walk on its own contour.
  std::vector<std::pair<int, int>> corners;
  int cr = start_r, cc = start_c;
  int dir = 0;
  const int start_corner_r = cr, start_corner_c = cc;
  size_t guard = static_cast<size_t>(H + 1) * corner_w * 4 + 8;
  while (guard-- > 0) {
    corners.push_back({cr, cc});
    cr += kDz[dir];
    cc += kDx[dir];
    if (cr == start_corner_r && cc == start_corner_c) break;
    auto& slot = outgoing[static_cast<size_t>(cr) * corner_w + cc];
    int next_dir;
    if (slot[1] < 0) {
      next_dir = slot[0];
    } else {
      int a = slot[0], b = slot[1];
      int cross_a = kDx[dir] * kDz[a] - kDz[dir] * kDx[a];
      next_dir = cross_a == -1 ? a : b;
    }
    if (next_dir < 0) throw GeometryError("boundary trace lost the contour");
    dir = next_dir;
  }
  if (guard == 0) throw GeometryError("boundary trace did not close");

  // Merge collinear runs.
  Polygon2 poly;
  const size_t n = corners.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& prev = corners[(i + n - 1) % n];
    const auto& cur = corners[i];
    const auto& next = corners[(i + 1) % n];
    int d1r = cur.first - prev.first, d1c = cur.second - prev.second;
    int d2r = next.first - cur.first, d2c = next.second - cur.second;
    if (d1r == d2r && d1c == d2c) continue;
    poly.push_back({cur.second * scale, cur.first * scale});
  }
  if (poly.size() < 4) throw GeometryError("degenerate floor polygon");
  if (polygon_area(poly) <= 0.0) throw GeometryError("floor polygon is not positively oriented");
  return poly;
}

}  // namespace

Polygon2 floor_polygon_from_mask(const ArchMask& mask, double scale) {
  std::vector<uint8_t> occupied(mask.cells.size());
  for (size_t p = 0; p < mask.cells.size(); ++p) occupied[p] = mask.cells[p] != kVoid;
  return trace_outer_boundary(largest_region(mask.height, mask.width, occupied), scale);
}

Polygon2 floor_polygon_from_map(const SemanticMap& map) {
  std::vector<uint8_t> occupied(map.cells.size());
  for (size_t p = 0; p < map.cells.size(); ++p) occupied[p] = map.cells[p] != kVoid;
  return trace_outer_boundary(largest_region(map.height, map.width, occupied), map.scale);
}

// --- Room mesh ---------------------------------------------------------------

namespace {

double cross2(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.z - o.z) - (a.z - o.z) * (b.x - o.x);
}

bool strictly_inside_triangle(const Point2& p, const Point2& a, const Point2& b,
                              const Point2& c, double eps) {
  double d1 = cross2(a, b, p);
  double d2 = cross2(b, c, p);
  double d3 = cross2(c, a, p);
  return d1 > eps && d2 > eps && d3 > eps;
}

std::vector<std::array<int, 3>> ear_clip(const Polygon2& poly) {
  std::vector<int> idx(poly.size());
  for (size_t i = 0; i < poly.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  double span = 0.0;
  for (const auto& p : poly) span = std::max({span, std::fabs(p.x), std::fabs(p.z)});
  const double eps = 1e-12 * std::max(span, 1.0);

  while (idx.size() > 3) {
    bool clipped = false;
    for (size_t i = 0; i < idx.size(); ++i) {
      const size_t n = idx.size();
      int ia = idx[(i + n - 1) % n], ib = idx[i], ic = idx[(i + 1) % n];
      const Point2 &a = poly[ia], &b = poly[ib], &c = poly[ic];
      double cr = cross2(a, b, c);
      if (cr <= eps) {
        if (std::fabs(cr) <= eps) {
          // Collinear chain created by earlier clips: drop the middle vertex.
          double dot = (b.x - a.x) * (c.x - b.x) + (b.z - a.z) * (c.z - b.z);
          if (dot > 0.0) {
            idx.erase(idx.begin() + static_cast<long>(i));
            clipped = true;
            break;
          }
        }
        continue;  // reflex vertex
      }
      bool blocked = false;
      for (int other : idx) {
        if (other == ia || other == ib || other == ic) continue;
        if (strictly_inside_triangle(poly[other], a, b, c, eps)) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + static_cast<long>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw GeometryError("ear clipping failed; polygon may self-intersect");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

double triangle_area_3d(const Vec3& a, const Vec3& b, const Vec3& c) {
  double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
  double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
  double cx = uy * vz - uz * vy;
  double cy = uz * vx - ux * vz;
  double cz = ux * vy - uy * vx;
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

}  // namespace

double RoomMesh::floor_area() const {
  double area = 0.0;
  for (size_t i = 0; i < floor_triangle_count; ++i)
    area += triangle_area_3d(vertices[triangles[i][0]], vertices[triangles[i][1]],
                             vertices[triangles[i][2]]);
  return area;
}

double RoomMesh::wall_area() const {
  double area = 0.0;
  for (size_t i = floor_triangle_count; i < triangles.size(); ++i)
    area += triangle_area_3d(vertices[triangles[i][0]], vertices[triangles[i][1]],
                             vertices[triangles[i][2]]);
  return area;
}

RoomMesh build_room_mesh(const Polygon2& polygon, const std::vector<WallOpening>& doors,
                         const std::vector<WallOpening>& windows, const RoomMeshConfig& cfg) {
  if (polygon.size() < 3) throw GeometryError("room polygon needs at least 3 vertices");
  Polygon2 poly = polygon;
  if (polygon_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());

  RoomMesh mesh;
  mesh.floor_polygon = poly;
  mesh.wall_height = cfg.wall_height;

  for (const auto& p : poly) mesh.vertices.push_back({p.x, 0.0, p.z});
  for (const auto& tri : ear_clip(poly)) mesh.triangles.push_back(tri);
  mesh.floor_triangle_count = mesh.triangles.size();

  const int n_edges = static_cast<int>(poly.size());
  std::vector<std::vector<WallOpening>> per_edge(n_edges);
  auto place = [&](const WallOpening& o, OpeningKind kind) {
    if (o.edge < 0 || o.edge >= n_edges) throw GeometryError("opening references a missing edge");
    const Point2& a = poly[o.edge];
    const Point2& b = poly[(o.edge + 1) % n_edges];
    double len = std::hypot(b.x - a.x, b.z - a.z);
    if (o.start < -1e-9 || o.end > len + 1e-9 || o.end - o.start <= 1e-9)
      throw GeometryError("opening span lies off its wall edge");
    WallOpening copy = o;
    copy.kind = kind;
    copy.start = std::max(0.0, o.start);
    copy.end = std::min(len, o.end);
    per_edge[o.edge].push_back(copy);
  };
  for (const auto& o : doors) place(o, OpeningKind::Door);
  for (const auto& o : windows) place(o, OpeningKind::Window);

  auto add_panel = [&mesh](const Point2& a, const Point2& u, double s0, double s1, double y0,
                           double y1) {
    if (s1 - s0 <= 1e-12 || y1 - y0 <= 1e-12) return;
    int base = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back({a.x + u.x * s0, y0, a.z + u.z * s0});
    mesh.vertices.push_back({a.x + u.x * s1, y0, a.z + u.z * s1});
    mesh.vertices.push_back({a.x + u.x * s1, y1, a.z + u.z * s1});
    mesh.vertices.push_back({a.x + u.x * s0, y1, a.z + u.z * s0});
    mesh.triangles.push_back({base, base + 1, base + 2});
    mesh.triangles.push_back({base, base + 2, base + 3});
  };

  for (int e = 0; e < n_edges; ++e) {
    auto& openings = per_edge[e];
    std::sort(openings.begin(), openings.end(),
              [](const WallOpening& x, const WallOpening& y) { return x.start < y.start; });
    for (size_t i = 1; i < openings.size(); ++i)
      if (openings[i].start < openings[i - 1].end - 1e-9)
        throw GeometryError("overlapping wall openings on one edge");

    const Point2& a = poly[e];
    const Point2& b = poly[(e + 1) % n_edges];
    double len = std::hypot(b.x - a.x, b.z - a.z);
    Point2 u{(b.x - a.x) / len, (b.z - a.z) / len};
    double cursor = 0.0;
    for (const auto& o : openings) {
      add_panel(a, u, cursor, o.start, 0.0, cfg.wall_height);
      if (o.kind == OpeningKind::Door) {
        add_panel(a, u, o.start, o.end, cfg.door_height, cfg.wall_height);
      } else {
        add_panel(a, u, o.start, o.end, 0.0, cfg.window_low);
        add_panel(a, u, o.start, o.end, cfg.window_high, cfg.wall_height);
      }
      mesh.openings.push_back(o);
      cursor = o.end;
    }
    add_panel(a, u, cursor, len, 0.0, cfg.wall_height);
  }
  return mesh;
}

std::vector<WallOpening> openings_from_mask(const ArchMask& mask, double scale,
                                            const Polygon2& polygon) {
  const int H = mask.height, W = mask.width;
  const int n_edges = static_cast<int>(polygon.size());
  std::vector<WallOpening> raw;

  for (uint8_t target : {static_cast<uint8_t>(kDoor), static_cast<uint8_t>(kWindow)}) {
    std::vector<uint8_t> seen(mask.cells.size(), 0);
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        size_t p = static_cast<size_t>(r) * W + c;
        if (mask.cells[p] != target || seen[p]) continue;
        // Flood the 4-connected run and record its bbox.
        std::vector<size_t> stack{p};
        seen[p] = 1;
        int r0 = r, r1 = r, c0 = c, c1 = c;
        double sum_r = 0.0, sum_c = 0.0;
        int count = 0;
        while (!stack.empty()) {
          size_t q = stack.back();
          stack.pop_back();
          int qr = static_cast<int>(q) / W, qc = static_cast<int>(q) % W;
          r0 = std::min(r0, qr); r1 = std::max(r1, qr);
          c0 = std::min(c0, qc); c1 = std::max(c1, qc);
          sum_r += qr + 0.5;
          sum_c += qc + 0.5;
          ++count;
          const int nr[4] = {qr - 1, qr + 1, qr, qr};
          const int nc[4] = {qc, qc, qc - 1, qc + 1};
          for (int i = 0; i < 4; ++i) {
            if (nr[i] < 0 || nr[i] >= H || nc[i] < 0 || nc[i] >= W) continue;
            size_t nn = static_cast<size_t>(nr[i]) * W + nc[i];
            if (mask.cells[nn] == target && !seen[nn]) {
              seen[nn] = 1;
              stack.push_back(nn);
            }
          }
        }
        Point2 centroid{sum_c / count * scale, sum_r / count * scale};
        int best_edge = 0;
        double best_dist = 1e300;
        for (int e = 0; e < n_edges; ++e) {
          const Point2& a = polygon[e];
          const Point2& b = polygon[(e + 1) % n_edges];
          double ex = b.x - a.x, ez = b.z - a.z;
          double len2 = ex * ex + ez * ez;
          double t = len2 > 0 ? ((centroid.x - a.x) * ex + (centroid.z - a.z) * ez) / len2 : 0.0;
          t = std::clamp(t, 0.0, 1.0);
          double dx = a.x + t * ex - centroid.x;
          double dz = a.z + t * ez - centroid.z;
          double dist = dx * dx + dz * dz;
          if (dist < best_dist) {
            best_dist = dist;
            best_edge = e;
          }
        }
        const Point2& a = polygon[best_edge];
        const Point2& b = polygon[(best_edge + 1) % n_edges];
        double len = std::hypot(b.x - a.x, b.z - a.z);
        Point2 u{(b.x - a.x) / len, (b.z - a.z) / len};
        Point2 corners[4] = {{c0 * scale, r0 * scale},
                             {(c1 + 1) * scale, r0 * scale},
                             {c0 * scale, (r1 + 1) * scale},
                             {(c1 + 1) * scale, (r1 + 1) * scale}};
        double s_lo = 1e300, s_hi = -1e300;
        for (const auto& pt : corners) {
          double s = (pt.x - a.x) * u.x + (pt.z - a.z) * u.z;
          s_lo = std::min(s_lo, s);
          s_hi = std::max(s_hi, s);
        }
        s_lo = std::clamp(s_lo, 0.0, len);
        s_hi = std::clamp(s_hi, 0.0, len);
        if (s_hi - s_lo <= 1e-9) continue;
        raw.push_back({target == kDoor ? OpeningKind::Door : OpeningKind::Window, best_edge,
                       s_lo, s_hi});
      }
    }
  }

  // Union overlapping same-kind spans, then trim windows out of door spans.
  std::vector<WallOpening> merged;
  for (int e = 0; e < n_edges; ++e) {
    for (OpeningKind kind : {OpeningKind::Door, OpeningKind::Window}) {
      std::vector<WallOpening> spans;
      for (const auto& o : raw)
        if (o.edge == e && o.kind == kind) spans.push_back(o);
      std::sort(spans.begin(), spans.end(),
                [](const WallOpening& x, const WallOpening& y) { return x.start < y.start; });
      std::vector<WallOpening> unioned;
      for (const auto& o : spans) {
        if (!unioned.empty() && o.start <= unioned.back().end + 1e-9)
          unioned.back().end = std::max(unioned.back().end, o.end);
        else
          unioned.push_back(o);
      }
      if (kind == OpeningKind::Window) {
        for (const auto& w : unioned) {
          // Subtract door intervals already accepted on this edge.
          std::vector<std::pair<double, double>> parts{{w.start, w.end}};
          for (const auto& d : merged) {
            if (d.edge != e || d.kind != OpeningKind::Door) continue;
            std::vector<std::pair<double, double>> next;
            for (auto [s0, s1] : parts) {
              if (d.end <= s0 || d.start >= s1) {
                next.push_back({s0, s1});
                continue;
              }
              if (d.start > s0) next.push_back({s0, d.start});
              if (d.end < s1) next.push_back({d.end, s1});
            }
            parts = std::move(next);
          }
          for (auto [s0, s1] : parts)
            if (s1 - s0 > 1e-9) merged.push_back({OpeningKind::Window, e, s0, s1});
        }
      } else {
        for (const auto& d : unioned) merged.push_back(d);
      }
    }
  }
  return merged;
}

std::array<Point2, 4> Placement::footprint_corners() const {
  const double hx = placed_size.x / 2.0, hz = placed_size.z / 2.0;
  const Point2 local[4] = {{-hx, -hz}, {hx, -hz}, {hx, hz}, {-hx, hz}};
  std::array<Point2, 4> out;
  for (int i = 0; i < 4; ++i) {
    Point2 r = rotate_xz(local[i], orientation);
    out[i] = {position.x + r.x, position.z + r.z};
  }
  return out;
}

Scene3D assemble_scene(const std::vector<ExtractedInstance>& instances,
                       const std::vector<InstanceAttributes>& attrs,
                       const AssetCatalog& catalog, const ArchMask& arch, double scale,
                       int room_type, const RoomMeshConfig& cfg, bool rescale_to_predicted) {
  if (instances.size() != attrs.size())
    throw ShapeError("instances and attribute lists differ in length");
  Scene3D scene;
  scene.room_type = room_type;
  Polygon2 polygon = floor_polygon_from_mask(arch, scale);
  auto openings = openings_from_mask(arch, scale, polygon);
  std::vector<WallOpening> doors, windows;
  for (const auto& o : openings)
    (o.kind == OpeningKind::Door ? doors : windows).push_back(o);
  scene.room = build_room_mesh(polygon, doors, windows, cfg);

  for (size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto& at = attrs[i];
    Vec3 predicted{inst.footprint_w, std::max(at.s_y, 0.01), inst.footprint_l};
    try {
      const Asset& asset = retrieve_asset(catalog, inst.mask.category, predicted);
      Placement p;
      p.asset_id = asset.id;
      p.category = inst.mask.category;
      p.position = {inst.center.x, at.p_y, inst.center.z};
      p.orientation = at.orientation;
      p.placed_size = rescale_to_predicted ? predicted : asset.size;
      scene.placements.push_back(std::move(p));
    } catch (const RetrievalError& e) {
      scene.retrieval_failures.push_back("instance " + std::to_string(i) + ": " + e.what());
    }
  }
  return scene;
}

Scene3D scene_from_ground_truth(const SceneRecord& record, const RoomMeshConfig& cfg) {
  Scene3D scene;
  scene.room_type = record.layout.room_type;
  Polygon2 polygon = floor_polygon_from_mask(record.arch, record.layout.map.scale);
  auto openings = openings_from_mask(record.arch, record.layout.map.scale, polygon);
  std::vector<WallOpening> doors, windows;
  for (const auto& o : openings)
    (o.kind == OpeningKind::Door ? doors : windows).push_back(o);
  scene.room = build_room_mesh(polygon, doors, windows, cfg);
  int serial = 0;
  for (const auto& inst : record.layout.instances) {
    Placement p;
    p.asset_id = "gt_" + std::to_string(serial++);
    p.category = inst.category;
    p.position = inst.position;
    p.orientation = inst.orientation;
    p.placed_size = inst.size;
    scene.placements.push_back(std::move(p));
  }
  return scene;
}

json scene_to_json(const Scene3D& scene) {
  json j;
  j["version"] = kSceneSchemaVersion;
  j["room_type"] = to_string(static_cast<RoomType>(scene.room_type));
  json polygon = json::array();
  for (const auto& p : scene.room.floor_polygon) polygon.push_back({p.x, p.z});
  json openings = json::array();
  for (const auto& o : scene.room.openings)
    openings.push_back({{"kind", o.kind == OpeningKind::Door ? "door" : "window"},
                        {"edge", o.edge},
                        {"start", o.start},
                        {"end", o.end}});
  j["room"] = {{"polygon", polygon},
               {"wall_height", scene.room.wall_height},
               {"openings", openings}};
  json placements = json::array();
  for (const auto& p : scene.placements)
    placements.push_back({{"asset_id", p.asset_id},
                          {"category", p.category},
                          {"position", {p.position.x, p.position.y, p.position.z}},
                          {"orientation", p.orientation},
                          {"size", {p.placed_size.x, p.placed_size.y, p.placed_size.z}}});
  j["placements"] = placements;
  j["retrieval_failures"] = scene.retrieval_failures;
  return j;
}

Scene3D scene_from_json(const json& j, const RoomMeshConfig& cfg) {
  if (!j.contains("version") || j.at("version").get<int>() != kSceneSchemaVersion)
    throw DataError("scene JSON has unsupported version");
  Scene3D scene;
  scene.room_type = static_cast<int>(room_type_from_string(j.at("room_type").get<std::string>()));
  Polygon2 polygon;
  for (const auto& jp : j.at("room").at("polygon"))
    polygon.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
  std::vector<WallOpening> doors, windows;
  for (const auto& jo : j.at("room").at("openings")) {
    WallOpening o;
    o.kind = jo.at("kind").get<std::string>() == "door" ? OpeningKind::Door : OpeningKind::Window;
    o.edge = jo.at("edge").get<int>();
    o.start = jo.at("start").get<double>();
    o.end = jo.at("end").get<double>();
    (o.kind == OpeningKind::Door ? doors : windows).push_back(o);
  }
  RoomMeshConfig mesh_cfg = cfg;
  mesh_cfg.wall_height = j.at("room").at("wall_height").get<double>();
  scene.room = build_room_mesh(polygon, doors, windows, mesh_cfg);
  for (const auto& jp : j.at("placements")) {
    Placement p;
    p.asset_id = jp.at("asset_id").get<std::string>();
    p.category = jp.at("category").get<int>();
    auto pos = jp.at("position");
    p.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
    p.orientation = jp.at("orientation").get<int>();
    auto s = jp.at("size");
    p.placed_size = {s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()};
    scene.placements.push_back(std::move(p));
  }
  scene.retrieval_failures = j.at("retrieval_failures").get<std::vector<std::string>>();
  return scene;
}

void export_scene_json(const std::filesystem::path& path, const Scene3D& scene) {
  save_json_file(path, scene_to_json(scene));
}

Scene3D import_scene_json(const std::filesystem::path& path, const RoomMeshConfig& cfg) {
  return scene_from_json(load_json_file(path), cfg);
}

void export_scene_obj(const std::filesystem::path& path, const Scene3D& scene) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[128];
  auto emit_vertex = [&](const Vec3& v) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out << buf;
  };
  out << "# room mesh + box proxies\n";
  for (const auto& v : scene.room.vertices) emit_vertex(v);
  for (const auto& t : scene.room.triangles)
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';

  int base = static_cast<int>(scene.room.vertices.size());
  for (const auto& p : scene.placements) {
    auto corners = p.footprint_corners();
    const double y0 = p.position.y, y1 = p.position.y + p.placed_size.y;
    for (double y : {y0, y1})
      for (const auto& c : corners) emit_vertex({c.x, y, c.z});
    // Bottom 0-3, top 4-7; 12 triangles.
    const int f[12][3] = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7},
                          {0, 1, 5}, {0, 5, 4}, {1, 2, 6}, {1, 6, 5},
                          {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
    for (const auto& tri : f)
      out << "f " << base + tri[0] + 1 << ' ' << base + tri[1] + 1 << ' ' << base + tri[2] + 1
          << '\n';
    base += 8;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace semscene
