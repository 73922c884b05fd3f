#include "semscene/geometry.hpp"

#include <algorithm>

#include "semscene/errors.hpp"

namespace semscene {

double polygon_area(const Polygon2& poly) {
  if (poly.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  double twice = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % poly.size()];
    twice += a.x * b.z - b.x * a.z;
  }
  return 0.5 * twice;
}

namespace {

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  double dx = b.x - a.x, dz = b.z - a.z;
  double len2 = dx * dx + dz * dz;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.z - a.z) * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  double ex = a.x + t * dx - p.x;
  double ez = a.z + t * dz - p.z;
  return std::sqrt(ex * ex + ez * ez);
}

}  // namespace

bool point_in_polygon(const Point2& p, const Polygon2& poly, double tol) {
  if (poly.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  for (size_t i = 0; i < poly.size(); ++i) {
    if (point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]) <= tol) return true;
  }
  // Crossing-number test on the z-parallel ray toward +x.
  bool inside = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.z > p.z) != (b.z > p.z)) {
      double x_cross = a.x + (p.z - a.z) / (b.z - a.z) * (b.x - a.x);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace semscene
