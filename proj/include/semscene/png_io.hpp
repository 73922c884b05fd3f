#pragma once

#include <filesystem>

#include "semscene/palette.hpp"
#include "semscene/semantic_map.hpp"

namespace semscene {

/// Writes the map as an 8-bit indexed PNG whose PLTE holds the palette colors.
void write_map_png(const std::filesystem::path& path, const SemanticMap& map,
                   const CategoryPalette& palette);

/// Reads an indexed PNG written by write_map_png. Scale and K are not stored
/// in the PNG, so the caller supplies them.
SemanticMap read_map_png(const std::filesystem::path& path, double scale, int K);

/// Writes an arbitrary RGB raster (row-major, 3 bytes per pixel).
void write_rgb_png(const std::filesystem::path& path, int height, int width,
                   const std::vector<uint8_t>& rgb);

}  // namespace semscene
