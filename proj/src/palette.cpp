#include "semscene/palette.hpp"

#include <cmath>
#include <unordered_set>

#include "semscene/errors.hpp"

namespace semscene {

namespace {

const char* kReservedNames[4] = {"void", "floor", "door", "window"};

Rgb hsv_to_rgb(double h, double s, double v) {
  double c = v * s;
  double hp = h / 60.0;
  double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1)      { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else             { r = c; b = x; }
  double m = v - c;
  auto to8 = [m](double u) { return static_cast<uint8_t>(std::lround((u + m) * 255.0)); };
  return {to8(r), to8(g), to8(b)};
}

}  // namespace

CategoryPalette::CategoryPalette(std::vector<std::string> names) : names_(std::move(names)) {
  if (static_cast<int>(names_.size()) < kFirstObjectCategory + 1)
    throw ConfigError("palette needs at least 5 categories (4 reserved + 1 object)");
  for (int i = 0; i < 4; ++i) {
    if (names_[i] != kReservedNames[i])
      throw ConfigError("palette index " + std::to_string(i) + " must be '" +
                        kReservedNames[i] + "', got '" + names_[i] + "'");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw ConfigError("duplicate palette label '" + n + "'");
  }
  colors_.resize(names_.size());
  colors_[kVoid] = {0, 0, 0};
  colors_[kFloor] = {210, 210, 210};
  colors_[kDoor] = {150, 90, 40};
  colors_[kWindow] = {80, 160, 230};
  // Golden-angle hue walk gives well-spread, index-deterministic object colors.
  for (size_t i = kFirstObjectCategory; i < names_.size(); ++i) {
    double h = std::fmod(30.0 + 137.50776405 * static_cast<double>(i - kFirstObjectCategory), 360.0);
    double v = (i % 2 == 0) ? 0.85 : 0.70;
    colors_[i] = hsv_to_rgb(h, 0.75, v);
  }
}

const std::string& CategoryPalette::name(int index) const {
  if (index < 0 || index >= K()) throw IndexError("palette name index out of range");
  return names_[index];
}

int CategoryPalette::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

const Rgb& CategoryPalette::color(int index) const {
  if (index < 0 || index >= K()) throw IndexError("palette color index out of range");
  return colors_[index];
}

uint64_t CategoryPalette::hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  mix(static_cast<uint8_t>(K()));
  for (const auto& n : names_) {
    for (char c : n) mix(static_cast<uint8_t>(c));
    mix(0);
  }
  return h;
}

CategoryPalette desk_palette() {
  return CategoryPalette({"void", "floor", "door", "window", "bed", "nightstand", "wardrobe",
                          "table", "chair", "sofa", "tv_stand", "ceiling_lamp"});
}

CategoryPalette paper_palette() {
  return CategoryPalette({
      "void", "floor", "door", "window",
      "kids_bed", "single_bed", "double_bed", "corner_side_table", "round_end_table",
      "coffee_table", "console_table", "tv_stand", "desk", "dressing_table", "table",
      "dining_table", "stool", "dressing_chair", "dining_chair", "chinese_chair",
      "armchair", "chair", "lounge_chair", "loveseat_sofa", "lazy_sofa", "sofa",
      "multi_seat_sofa", "chaise_longue_sofa", "l_shaped_sofa", "nightstand", "shelf",
      "bookshelf", "children_cabinet", "wine_cabinet", "cabinet", "wardrobe",
      "pendant_lamp", "ceiling_lamp"});
}

CategoryPalette palette_preset(const std::string& name) {
  if (name == "desk") return desk_palette();
  if (name == "paper") return paper_palette();
  throw ConfigError("unknown palette preset '" + name + "' (expected desk|paper)");
}

}  // namespace semscene
