#include "semscene/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

namespace semscene {

using nlohmann::json;

long CategoryHistogram::total() const {
  long t = 0;
  for (const auto& [cat, n] : counts) {
    if (n < 0) throw DistributionError("histogram counts must be non-negative");
    t += n;
  }
  return t;
}

std::map<int, double> CategoryHistogram::frequencies() const {
  long t = total();
  std::map<int, double> freq;
  if (t == 0) return freq;
  for (const auto& [cat, n] : counts) freq[cat] = static_cast<double>(n) / t;
  return freq;
}

double ckl(const CategoryHistogram& p, const CategoryHistogram& q) {
  if (p.empty() && q.empty()) throw DistributionError("ckl: both histograms empty");
  auto fp = p.frequencies();
  auto fq = q.frequencies();
  std::set<int> cats;
  for (const auto& [c, n] : p.counts) cats.insert(c);
  for (const auto& [c, n] : q.counts) cats.insert(c);
  double value = 0.0;
  for (int c : cats) {
    double pc = fp.count(c) ? fp.at(c) : 0.0;
    double qc = fq.count(c) ? fq.at(c) : 0.0;
    if (pc == 0.0) continue;
    value += pc * std::log((pc + kCklEpsilon) / (qc + kCklEpsilon));
  }
  return value;
}

OobResult oob(const Scene3D& scene) {
  if (scene.room.floor_polygon.size() < 3) throw GeometryError("oob: degenerate floor polygon");
  OobResult res;
  res.object_flags.reserve(scene.placements.size());
  int flagged = 0;
  for (const auto& p : scene.placements) {
    bool out = false;
    for (const auto& corner : p.footprint_corners()) {
      if (!point_in_polygon(corner, scene.room.floor_polygon, 1e-6)) {
        out = true;
        break;
      }
    }
    res.object_flags.push_back(out);
    flagged += out;
  }
  res.oob_object_ratio =
      scene.placements.empty() ? 0.0 : static_cast<double>(flagged) / scene.placements.size();
  res.scene_flag = flagged > 0;
  return res;
}

namespace {

struct Aabb2 {
  double x0, x1, z0, z1;
};

Aabb2 footprint_aabb(const Placement& p) {
  Point2 ext = rotated_extents(p.placed_size.x, p.placed_size.z, p.orientation);
  return {p.position.x - ext.x / 2, p.position.x + ext.x / 2, p.position.z - ext.z / 2,
          p.position.z + ext.z / 2};
}

}  // namespace

bool placements_collide(const Placement& a, const Placement& b) {
  constexpr double tol = 1e-9;
  Aabb2 fa = footprint_aabb(a), fb = footprint_aabb(b);
  if (std::min(fa.x1, fb.x1) - std::max(fa.x0, fb.x0) <= tol) return false;
  if (std::min(fa.z1, fb.z1) - std::max(fa.z0, fb.z0) <= tol) return false;
  double ya0 = a.position.y, ya1 = a.position.y + a.placed_size.y;
  double yb0 = b.position.y, yb1 = b.position.y + b.placed_size.y;
  return std::min(ya1, yb1) - std::max(ya0, yb0) > tol;
}

double collision_rate(const Scene3D& scene) {
  const size_t n = scene.placements.size();
  if (n == 0) return 0.0;
  std::vector<bool> hit(n, false);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (placements_collide(scene.placements[i], scene.placements[j])) {
        hit[i] = true;
        hit[j] = true;
      }
  long count = std::count(hit.begin(), hit.end(), true);
  return 100.0 * count / static_cast<double>(n);
}

double navigability(const Scene3D& scene, double cell, double obstacle_cutoff) {
  if (scene.room.floor_polygon.size() < 3) throw GeometryError("navigability: missing polygon");
  if (cell <= 0.0) throw ConfigError("navigability: cell size must be positive");
  const auto& poly = scene.room.floor_polygon;
  double x0 = 1e300, x1 = -1e300, z0 = 1e300, z1 = -1e300;
  for (const auto& p : poly) {
    x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
    z0 = std::min(z0, p.z); z1 = std::max(z1, p.z);
  }
  const int nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / cell)));
  const int nz = std::max(1, static_cast<int>(std::ceil((z1 - z0) / cell)));

  std::vector<Aabb2> obstacles;
  for (const auto& p : scene.placements)
    if (p.position.y < obstacle_cutoff) obstacles.push_back(footprint_aabb(p));

  std::vector<uint8_t> free_cell(static_cast<size_t>(nx) * nz, 0);
  long free_count = 0;
  for (int iz = 0; iz < nz; ++iz) {
    for (int ix = 0; ix < nx; ++ix) {
      Point2 center{x0 + (ix + 0.5) * cell, z0 + (iz + 0.5) * cell};
      if (!point_in_polygon(center, poly, 1e-9)) continue;
      bool blocked = false;
      for (const auto& ob : obstacles) {
        if (center.x > ob.x0 + 1e-9 && center.x < ob.x1 - 1e-9 && center.z > ob.z0 + 1e-9 &&
            center.z < ob.z1 - 1e-9) {
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        free_cell[static_cast<size_t>(iz) * nx + ix] = 1;
        ++free_count;
      }
    }
  }
  if (free_count == 0) return 0.0;

  long best_region = 0;
  std::vector<uint8_t> seen(free_cell.size(), 0);
  std::vector<size_t> stack;
  for (size_t p = 0; p < free_cell.size(); ++p) {
    if (!free_cell[p] || seen[p]) continue;
    long size = 0;
    stack.assign(1, p);
    seen[p] = 1;
    while (!stack.empty()) {
      size_t q = stack.back();
      stack.pop_back();
      ++size;
      int qz = static_cast<int>(q) / nx, qx = static_cast<int>(q) % nx;
      const int nz4[4] = {qz - 1, qz + 1, qz, qz};
      const int nx4[4] = {qx, qx, qx - 1, qx + 1};
      for (int i = 0; i < 4; ++i) {
        if (nz4[i] < 0 || nz4[i] >= nz || nx4[i] < 0 || nx4[i] >= nx) continue;
        size_t n = static_cast<size_t>(nz4[i]) * nx + nx4[i];
        if (free_cell[n] && !seen[n]) {
          seen[n] = 1;
          stack.push_back(n);
        }
      }
    }
    best_region = std::max(best_region, size);
  }
  return 100.0 * best_region / static_cast<double>(free_count);
}

MetricReport evaluate_corpus(const std::vector<Scene3D>& scenes,
                             const std::map<int, CategoryHistogram>& gt_per_type) {
  if (scenes.empty()) throw DataError("evaluate_corpus: no scenes");
  MetricReport report;

  std::map<int, std::vector<const Scene3D*>> by_type;
  for (const auto& s : scenes) by_type[s.room_type].push_back(&s);

  CategoryHistogram pooled_gt, pooled_gen;
  for (const auto& [type, hist] : gt_per_type)
    for (const auto& [cat, n] : hist.counts) pooled_gt.add(cat, n);

  for (const auto& [type, list] : by_type) {
    MetricRow row;
    row.label = to_string(static_cast<RoomType>(type));
    row.scenes = static_cast<int>(list.size());
    CategoryHistogram gen;
    long objects = 0, oob_objects = 0, col_objects = 0, col_total = 0;
    int oob_scenes = 0;
    double nav_sum = 0.0;
    for (const Scene3D* s : list) {
      for (const auto& p : s->placements) {
        gen.add(p.category);
        pooled_gen.add(p.category);
      }
      objects += static_cast<long>(s->placements.size());
      OobResult o = oob(*s);
      oob_objects += std::count(o.object_flags.begin(), o.object_flags.end(), true);
      oob_scenes += o.scene_flag;
      col_objects += std::lround(collision_rate(*s) / 100.0 * s->placements.size());
      col_total += static_cast<long>(s->placements.size());
      nav_sum += navigability(*s);
    }
    row.mean_objects = static_cast<double>(objects) / row.scenes;
    row.oob_scene_pct = 100.0 * oob_scenes / row.scenes;
    row.oob_object_pct = objects > 0 ? 100.0 * oob_objects / objects : 0.0;
    row.collision_pct = col_total > 0 ? 100.0 * col_objects / col_total : 0.0;
    row.nav_pct = nav_sum / row.scenes;
    auto it = gt_per_type.find(type);
    if (it != gt_per_type.end() && !(it->second.empty() && gen.empty()))
      row.ckl_x100 = 100.0 * ckl(it->second, gen);
    report.per_type.push_back(row);
  }

  MetricRow overall;
  overall.label = "overall";
  for (const auto& row : report.per_type) {
    overall.scenes += row.scenes;
    overall.ckl_x100 += row.ckl_x100;
    overall.oob_scene_pct += row.oob_scene_pct;
    overall.oob_object_pct += row.oob_object_pct;
    overall.collision_pct += row.collision_pct;
    overall.nav_pct += row.nav_pct;
    overall.mean_objects += row.mean_objects;
  }
  const double n_types = static_cast<double>(report.per_type.size());
  overall.ckl_x100 /= n_types;
  overall.oob_scene_pct /= n_types;
  overall.oob_object_pct /= n_types;
  overall.collision_pct /= n_types;
  overall.nav_pct /= n_types;
  overall.mean_objects /= n_types;
  report.overall = overall;
  if (!pooled_gt.empty() || !pooled_gen.empty())
    report.pooled_ckl_x100 = 100.0 * ckl(pooled_gt, pooled_gen);
  return report;
}

namespace {

json row_to_json(const MetricRow& row) {
  return {{"label", row.label},
          {"scenes", row.scenes},
          {"ckl_x100", row.ckl_x100},
          {"oob_scene_pct", row.oob_scene_pct},
          {"oob_object_pct", row.oob_object_pct},
          {"collision_pct", row.collision_pct},
          {"nav_pct", row.nav_pct},
          {"mean_objects", row.mean_objects}};
}

}  // namespace

json report_to_json(const MetricReport& report) {
  json j;
  j["version"] = 1;
  json rows = json::array();
  for (const auto& row : report.per_type) rows.push_back(row_to_json(row));
  j["per_type"] = rows;
  j["overall"] = row_to_json(report.overall);
  j["pooled_ckl_x100"] = report.pooled_ckl_x100;
  return j;
}

void write_report_csv(const std::filesystem::path& path, const MetricReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "room_type,scenes,ckl_x100,oob_scene_pct,oob_object_pct,collision_pct,nav_pct,mean_objects\n";
  char buf[256];
  auto emit = [&](const MetricRow& row) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", row.label.c_str(),
                  row.scenes, row.ckl_x100, row.oob_scene_pct, row.oob_object_pct,
                  row.collision_pct, row.nav_pct, row.mean_objects);
    out << buf;
  };
  for (const auto& row : report.per_type) emit(row);
  emit(report.overall);
}

}  // namespace semscene
