#pragma once

#include <optional>
#include <string>

#include "semscene/dataset.hpp"
#include "semscene/extraction.hpp"
#include "semscene/geometry.hpp"

namespace semscene {

struct Asset {
  std::string id;
  int category = kFirstObjectCategory;
  Vec3 size;  // meters, local frame
};

struct AssetCatalog {
  std::vector<Asset> assets;

  void validate() const;
  const Asset* find(const std::string& id) const;
};

nlohmann::json catalog_to_json(const AssetCatalog& catalog);
AssetCatalog catalog_from_json(const nlohmann::json& j);

/// Synthetic stand-in catalog: every distinct ground-truth instance size
/// (quantized to 1 mm) becomes an asset named <category>_<serial>.
AssetCatalog catalog_from_records(const std::vector<SceneRecord>& records,
                                  const CategoryPalette& palette);

/// Argmin over the category's assets of MSE(s_p, s_a) = (1/3) sum_d
/// (s_p,d - s_a,d)^2; ties break to the lexicographically smaller id.
const Asset& retrieve_asset(const AssetCatalog& catalog, int category, const Vec3& predicted_size);

enum class OpeningKind : int { Door = 0, Window = 1 };

/// Cutout span on a floor-polygon edge, as offsets in meters from the
/// edge's start vertex.
struct WallOpening {
  OpeningKind kind = OpeningKind::Door;
  int edge = 0;
  double start = 0.0;
  double end = 0.0;
};

struct RoomMeshConfig {
  double wall_height = 3.0;
  double door_height = 2.0;      // doors cut from y=0
  double window_low = 0.5;       // window sill
  double window_high = 2.0;
};

struct RoomMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;  // floor triangles first
  size_t floor_triangle_count = 0;
  Polygon2 floor_polygon;
  double wall_height = 3.0;
  std::vector<WallOpening> openings;

  double floor_area() const;
  double wall_area() const;
};

/// Boundary of the largest 4-connected non-void region, traced along pixel
/// edges as a closed CCW (positive-area) rectilinear polygon with collinear
/// vertices merged. Interior holes are ignored.
Polygon2 floor_polygon_from_mask(const ArchMask& mask, double scale);
Polygon2 floor_polygon_from_map(const SemanticMap& map);

/// Floor triangulation plus one extruded wall per polygon edge, with
/// rectangular holes for doors (y in [0, door_height]) and windows
/// (y in [window_low, window_high]).
RoomMesh build_room_mesh(const Polygon2& polygon, const std::vector<WallOpening>& doors,
                         const std::vector<WallOpening>& windows,
                         const RoomMeshConfig& cfg = {});

/// Door/window spans recovered from the arch mask: each 4-connected run of
/// door/window cells projects onto the nearest floor-polygon edge.
std::vector<WallOpening> openings_from_mask(const ArchMask& mask, double scale,
                                            const Polygon2& polygon);

struct Placement {
  std::string asset_id;
  int category = kFirstObjectCategory;
  Vec3 position;      // x/z footprint center, y bottom offset
  int orientation = 0;
  Vec3 placed_size;   // local frame

  /// World-space footprint corners (4), accounting for orientation.
  std::array<Point2, 4> footprint_corners() const;
};

struct Scene3D {
  int room_type = 0;
  RoomMesh room;
  std::vector<Placement> placements;
  std::vector<std::string> retrieval_failures;
};

struct InstanceAttributes {
  double s_y = 0.0;
  double p_y = 0.0;
  int orientation = 0;
};

/// Retrieval + placement over extracted instances. The predicted 3D size
/// passed to retrieval is (footprint width, s_y, footprint length); the
/// placement keeps the catalog size unless rescale_to_predicted is set.
/// Retrieval failures are reported per instance, not fatal.
Scene3D assemble_scene(const std::vector<ExtractedInstance>& instances,
                       const std::vector<InstanceAttributes>& attrs,
                       const AssetCatalog& catalog, const ArchMask& arch, double scale,
                       int room_type, const RoomMeshConfig& cfg = {},
                       bool rescale_to_predicted = false);

/// Scene built directly from ground-truth annotations (no retrieval).
Scene3D scene_from_ground_truth(const SceneRecord& record, const RoomMeshConfig& cfg = {});

inline constexpr int kSceneSchemaVersion = 1;

nlohmann::json scene_to_json(const Scene3D& scene);
Scene3D scene_from_json(const nlohmann::json& j, const RoomMeshConfig& cfg = {});

void export_scene_json(const std::filesystem::path& path, const Scene3D& scene);
Scene3D import_scene_json(const std::filesystem::path& path, const RoomMeshConfig& cfg = {});

/// Room mesh plus one axis-box proxy per placement (8 vertices each).
void export_scene_obj(const std::filesystem::path& path, const Scene3D& scene);

}  // namespace semscene
