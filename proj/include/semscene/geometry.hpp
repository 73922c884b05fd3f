#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace semscene {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3&) const = default;
};

/// 2D point in the floor plane (x right, z down in map view).
struct Point2 {
  double x = 0.0;
  double z = 0.0;

  bool operator==(const Point2&) const = default;
};

/// Orientation classes: front direction r*90° about the vertical axis,
/// r=0 => +z, r=1 => +x, r=2 => -z, r=3 => -x.
inline Point2 front_direction(int r) {
  switch (r & 3) {
    case 0: return {0.0, 1.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, -1.0};
    default: return {-1.0, 0.0};
  }
}

/// Rotates a local-frame (x, z) offset by r*90° about the vertical axis.
inline Point2 rotate_xz(Point2 p, int r) {
  switch (r & 3) {
    case 0: return p;
    case 1: return {p.z, -p.x};
    case 2: return {-p.x, -p.z};
    default: return {-p.z, p.x};
  }
}

/// World-axis half extents of a local (sx, sz) footprint rotated by r.
inline Point2 rotated_extents(double sx, double sz, int r) {
  return (r & 1) ? Point2{sz, sx} : Point2{sx, sz};
}

/// Simple polygon in the floor plane; positive shoelace area = CCW.
using Polygon2 = std::vector<Point2>;

double polygon_area(const Polygon2& poly);

/// Point-in-polygon with boundary counted as inside (within tol of an edge).
bool point_in_polygon(const Point2& p, const Polygon2& poly, double tol = 1e-9);

}  // namespace semscene
