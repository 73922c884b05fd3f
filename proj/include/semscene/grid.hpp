#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "semscene/errors.hpp"

namespace semscene {

/// Row-major H×W cell grid.
template <typename T>
struct Grid {
  int height = 0;
  int width = 0;
  std::vector<T> cells;

  Grid() = default;
  Grid(int h, int w, T fill = T{}) : height(h), width(w), cells(static_cast<size_t>(h) * w, fill) {
    if (h <= 0 || w <= 0) throw ShapeError("grid dimensions must be positive");
  }

  bool in_bounds(int r, int c) const { return r >= 0 && r < height && c >= 0 && c < width; }

  T& at(int r, int c) { return cells[static_cast<size_t>(r) * width + c]; }
  const T& at(int r, int c) const { return cells[static_cast<size_t>(r) * width + c]; }

  T& checked_at(int r, int c) {
    if (!in_bounds(r, c)) throw IndexError("grid access out of bounds");
    return at(r, c);
  }
  const T& checked_at(int r, int c) const {
    if (!in_bounds(r, c)) throw IndexError("grid access out of bounds");
    return at(r, c);
  }

  size_t size() const { return cells.size(); }

  bool operator==(const Grid&) const = default;
};

/// H×W×K per-pixel probability (or one-hot) grid, pixel-major.
struct CategoricalGrid {
  int height = 0;
  int width = 0;
  int K = 0;
  std::vector<double> values;

  CategoricalGrid() = default;
  CategoricalGrid(int h, int w, int k, double fill = 0.0)
      : height(h), width(w), K(k), values(static_cast<size_t>(h) * w * k, fill) {
    if (h <= 0 || w <= 0 || k <= 0) throw ShapeError("categorical grid dimensions must be positive");
  }

  size_t pixel_count() const { return static_cast<size_t>(height) * width; }

  std::span<double> pixel(int r, int c) {
    return {values.data() + (static_cast<size_t>(r) * width + c) * K, static_cast<size_t>(K)};
  }
  std::span<const double> pixel(int r, int c) const {
    return {values.data() + (static_cast<size_t>(r) * width + c) * K, static_cast<size_t>(K)};
  }
  std::span<double> pixel(size_t flat) {
    return {values.data() + flat * K, static_cast<size_t>(K)};
  }
  std::span<const double> pixel(size_t flat) const {
    return {values.data() + flat * K, static_cast<size_t>(K)};
  }

  double at(int r, int c, int k) const {
    return values[(static_cast<size_t>(r) * width + c) * K + k];
  }
  double& at(int r, int c, int k) {
    return values[(static_cast<size_t>(r) * width + c) * K + k];
  }

  /// Checks every pixel sums to 1 within tol with non-negative entries.
  void validate(double tol = 1e-9) const;

  /// Per-pixel argmax category (first index wins ties).
  std::vector<uint8_t> argmax() const;
};

}  // namespace semscene
