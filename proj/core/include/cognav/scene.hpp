#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cognav/geometry.hpp"

namespace cognav {

struct ObjectInstance {
  std::string id;
  std::string semantic;
  Box3D box;

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct Cell {
  int col = 0;
  int row = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Row-major boolean occupancy over the ground plane. `origin` is the world
// position of the center of cell (0, 0); cell (c, r) has its center at
// origin + (c * resolution, 0, r * resolution). Cells never mutate after
// construction.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(double resolution, WorldPoint origin, int width, int height,
                std::vector<std::uint8_t> navigable_cells);

  double resolution() const { return resolution_; }
  const WorldPoint& origin() const { return origin_; }
  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(Cell c) const {
    return c.col >= 0 && c.col < width_ && c.row >= 0 && c.row < height_;
  }
  bool navigable(Cell c) const {
    return in_bounds(c) && cells_[static_cast<std::size_t>(c.row) * width_ + c.col] != 0;
  }
  WorldPoint cell_center(Cell c) const {
    return {origin_.x + c.col * resolution_, origin_.y, origin_.z + c.row * resolution_};
  }
  // Rounds to the nearest cell indices; may be out of bounds.
  Cell nearest_cell(const WorldPoint& p) const;

  std::size_t navigable_count() const;
  // World-space interval covered by the grid, including the half-cell margin
  // around the outermost cell centers.
  double extent_x_min() const { return origin_.x - 0.5 * resolution_; }
  double extent_x_max() const { return origin_.x + (width_ - 0.5) * resolution_; }
  double extent_z_min() const { return origin_.z - 0.5 * resolution_; }
  double extent_z_max() const { return origin_.z + (height_ - 0.5) * resolution_; }
  // Length of the extent diagonal; used to cap outward searches.
  double extent_diagonal() const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  double resolution_ = 1.0;
  WorldPoint origin_;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Affine map between world ground coordinates and floorplan pixels:
// px = scale * x + offset_x, pz = scale * z + offset_z.
struct FloorplanMapping {
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_z = 0.0;
  int image_width = 1;
  int image_height = 1;

  friend bool operator==(const FloorplanMapping&, const FloorplanMapping&) = default;
};

std::pair<double, double> world_to_pixel(const FloorplanMapping& m, const WorldPoint& p);
WorldPoint pixel_to_world(const FloorplanMapping& m, double px, double pz);

struct SceneAnnotation {
  std::string scene_id;
  std::vector<ObjectInstance> objects;
  OccupancyGrid grid;
  FloorplanMapping floorplan;

  const ObjectInstance* find_object(std::string_view id) const;

  friend bool operator==(const SceneAnnotation&, const SceneAnnotation&) = default;
};

// Parses and validates a scene document. Throws SchemaError for malformed
// documents, GeometryError for inverted or out-of-extent boxes and duplicate
// ids, GridError for grids without a navigable cell.
SceneAnnotation parse_scene(std::string_view text);

// Canonical serialization; parse_scene(serialize_scene(s)) == s.
std::string serialize_scene(const SceneAnnotation& scene);

}  // namespace cognav
