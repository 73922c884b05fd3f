#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace semscene {

/// Reserved architectural category indices. Object categories start at
/// kFirstObjectCategory and run to K-1.
inline constexpr int kVoid = 0;
inline constexpr int kFloor = 1;
inline constexpr int kDoor = 2;
inline constexpr int kWindow = 3;
inline constexpr int kFirstObjectCategory = 4;

using Rgb = std::array<uint8_t, 3>;

/// Ordered category labels with deterministic display colors.
/// Indices 0..3 are always void/floor/door/window.
class CategoryPalette {
 public:
  /// Builds a palette from labels; first four must be the reserved names
  /// "void", "floor", "door", "window".
  explicit CategoryPalette(std::vector<std::string> names);

  int K() const { return static_cast<int>(names_.size()); }
  int object_category_count() const { return K() - kFirstObjectCategory; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int index) const;
  /// Index of a label, or -1 when absent.
  int index_of(const std::string& name) const;
  bool is_object_category(int index) const {
    return index >= kFirstObjectCategory && index < K();
  }

  const Rgb& color(int index) const;
  const std::vector<Rgb>& colors() const { return colors_; }

  /// FNV-1a over K and the label list; stamped into checkpoints and manifests.
  uint64_t hash() const;

  bool operator==(const CategoryPalette& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::vector<Rgb> colors_;
};

/// 12-category desk palette: 8 object categories plus the reserved four.
CategoryPalette desk_palette();

/// 38-category palette (34 object categories) used at full scale.
CategoryPalette paper_palette();

/// Palette preset by name: "desk" or "paper".
CategoryPalette palette_preset(const std::string& name);

}  // namespace semscene
