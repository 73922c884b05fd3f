#pragma once

#include <map>

#include "semscene/assembly.hpp"

namespace semscene {

/// Object-category occurrence counts with lazy normalization.
struct CategoryHistogram {
  std::map<int, long> counts;

  void add(int category, long n = 1) { counts[category] += n; }
  long total() const;
  bool empty() const { return total() == 0; }
  /// Normalized frequencies over the union of categories in *this.
  std::map<int, double> frequencies() const;
};

inline constexpr double kCklEpsilon = 1e-6;

/// CKL = sum_c p(c) log((p(c)+eps)/(q(c)+eps)) over the union of categories;
/// p comes from ground truth, q from generated scenes. Raw value (the paper
/// tables report this x100).
double ckl(const CategoryHistogram& p, const CategoryHistogram& q);

struct OobResult {
  std::vector<bool> object_flags;
  double oob_object_ratio = 0.0;  // in [0, 1]
  bool scene_flag = false;
};

/// An object is out of bounds when any rotated footprint corner lies outside
/// the floor polygon beyond 1e-6 m; boundary contact counts as inside.
OobResult oob(const Scene3D& scene);

/// Overlap test on world-axis footprint rectangles and vertical intervals
/// [p_y, p_y + s_y]; contact within 1e-9 is not a collision.
bool placements_collide(const Placement& a, const Placement& b);

/// Percentage of objects involved in at least one pairwise collision.
double collision_rate(const Scene3D& scene);

/// Largest connected free region as a percentage of all free cells, on a
/// floor rasterization at the given cell size. Objects whose bottom is below
/// obstacle_cutoff block the cells their footprint covers.
double navigability(const Scene3D& scene, double cell = 0.1, double obstacle_cutoff = 2.0);

struct MetricRow {
  std::string label;
  int scenes = 0;
  double ckl_x100 = 0.0;
  double oob_scene_pct = 0.0;
  double oob_object_pct = 0.0;
  double collision_pct = 0.0;
  double nav_pct = 0.0;
  double mean_objects = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> per_type;
  MetricRow overall;            // unweighted mean across room types
  double pooled_ckl_x100 = 0.0; // vs the pooled ground-truth histogram
};

/// Aggregates every metric per room type plus the unweighted overall mean.
MetricReport evaluate_corpus(const std::vector<Scene3D>& scenes,
                             const std::map<int, CategoryHistogram>& gt_per_type);

nlohmann::json report_to_json(const MetricReport& report);
void write_report_csv(const std::filesystem::path& path, const MetricReport& report);

}  // namespace semscene
