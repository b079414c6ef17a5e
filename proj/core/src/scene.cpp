#include "cognav/scene.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "canon_json.hpp"
#include "json_schema.hpp"

namespace cognav {

using detail::json;

OccupancyGrid::OccupancyGrid(double resolution, WorldPoint origin, int width, int height,
                             std::vector<std::uint8_t> navigable_cells)
    : resolution_(resolution),
      origin_(origin),
      width_(width),
      height_(height),
      cells_(std::move(navigable_cells)) {
  if (resolution_ <= 0.0 || !std::isfinite(resolution_)) {
    throw GridError("grid resolution must be positive");
  }
  if (width_ <= 0 || height_ <= 0) throw GridError("grid dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(width_) * height_) {
    throw GridError("grid cell buffer does not match width * height");
  }
}

Cell OccupancyGrid::nearest_cell(const WorldPoint& p) const {
  return {static_cast<int>(std::lround((p.x - origin_.x) / resolution_)),
          static_cast<int>(std::lround((p.z - origin_.z) / resolution_))};
}

std::size_t OccupancyGrid::navigable_count() const {
  std::size_t n = 0;
  for (std::uint8_t c : cells_) n += c != 0;
  return n;
}

double OccupancyGrid::extent_diagonal() const {
  return std::hypot(extent_x_max() - extent_x_min(), extent_z_max() - extent_z_min());
}

std::pair<double, double> world_to_pixel(const FloorplanMapping& m, const WorldPoint& p) {
  return {m.scale * p.x + m.offset_x, m.scale * p.z + m.offset_z};
}

WorldPoint pixel_to_world(const FloorplanMapping& m, double px, double pz) {
  return {(px - m.offset_x) / m.scale, 0.0, (pz - m.offset_z) / m.scale};
}

const ObjectInstance* SceneAnnotation::find_object(std::string_view id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

namespace {

std::array<double, 2> read_pair(const json& v, const std::string& path) {
  detail::require_array(v, path);
  if (v.size() != 2) throw SchemaError("expected 2 elements", path);
  return {detail::as_finite_number(v[0], detail::at_index(path, 0)),
          detail::as_finite_number(v[1], detail::at_index(path, 1))};
}

Box3D read_box(const json& v, const std::string& path) {
  detail::require_object(v, path);
  detail::reject_unknown_keys(v, {"x", "y", "z"}, path);
  const auto x = read_pair(detail::require_field(v, "x", path), detail::join(path, "x"));
  const auto y = read_pair(detail::require_field(v, "y", path), detail::join(path, "y"));
  const auto z = read_pair(detail::require_field(v, "z", path), detail::join(path, "z"));
  return {x[0], x[1], y[0], y[1], z[0], z[1]};
}

ObjectInstance read_object(const json& v, const std::string& path) {
  detail::require_object(v, path);
  detail::reject_unknown_keys(v, {"id", "semantic", "box"}, path);
  ObjectInstance obj;
  obj.id = detail::require_string(v, "id", path);
  obj.semantic = detail::require_string(v, "semantic", path);
  if (obj.id.empty()) throw SchemaError("id must be non-empty", detail::join(path, "id"));
  if (obj.semantic.empty()) {
    throw SchemaError("semantic must be non-empty", detail::join(path, "semantic"));
  }
  obj.box = read_box(detail::require_field(v, "box", path), detail::join(path, "box"));
  const auto axis_ok = [](double lo, double hi) { return lo <= hi; };
  if (!axis_ok(obj.box.x_min, obj.box.x_max) || !axis_ok(obj.box.y_min, obj.box.y_max) ||
      !axis_ok(obj.box.z_min, obj.box.z_max)) {
    throw GeometryError("inverted box for object '" + obj.id + "'", detail::join(path, "box"));
  }
  return obj;
}

OccupancyGrid read_grid(const json& v, const std::string& path) {
  detail::require_object(v, path);
  detail::reject_unknown_keys(v, {"resolution", "origin", "width", "height", "rows"}, path);
  const double resolution = detail::require_number(v, "resolution", path);
  if (resolution <= 0.0) {
    throw GridError("resolution must be positive", detail::join(path, "resolution"));
  }
  const json& jorigin = detail::require_field(v, "origin", path);
  const std::string origin_path = detail::join(path, "origin");
  detail::require_array(jorigin, origin_path);
  if (jorigin.size() != 3) throw SchemaError("expected 3 elements", origin_path);
  WorldPoint origin{detail::as_finite_number(jorigin[0], detail::at_index(origin_path, 0)),
                    detail::as_finite_number(jorigin[1], detail::at_index(origin_path, 1)),
                    detail::as_finite_number(jorigin[2], detail::at_index(origin_path, 2))};
  const std::int64_t width = detail::require_integer(v, "width", path);
  const std::int64_t height = detail::require_integer(v, "height", path);
  if (width < 1 || height < 1) throw GridError("grid dimensions must be positive", path);
  if (width > 100000 || height > 100000) throw GridError("grid dimensions too large", path);

  const json& jrows = detail::require_field(v, "rows", path);
  const std::string rows_path = detail::join(path, "rows");
  detail::require_array(jrows, rows_path);
  if (jrows.size() != static_cast<std::size_t>(height)) {
    throw SchemaError("row count does not match height", rows_path);
  }
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(width) * height, 0);
  for (std::size_t r = 0; r < jrows.size(); ++r) {
    const std::string row_path = detail::at_index(rows_path, r);
    if (!jrows[r].is_string()) throw SchemaError("expected string", row_path);
    const std::string row = jrows[r].get<std::string>();
    if (row.size() != static_cast<std::size_t>(width)) {
      throw SchemaError("row length does not match width", row_path);
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == '.') {
        cells[r * width + c] = 1;
      } else if (row[c] != '#') {
        throw SchemaError("row characters must be '.' or '#'", row_path);
      }
    }
  }
  OccupancyGrid grid(resolution, origin, static_cast<int>(width), static_cast<int>(height),
                     std::move(cells));
  if (grid.navigable_count() == 0) throw GridError("grid has no navigable cell", path);
  return grid;
}

FloorplanMapping read_floorplan(const json& v, const std::string& path) {
  detail::require_object(v, path);
  detail::reject_unknown_keys(v, {"scale", "offset", "image_size"}, path);
  FloorplanMapping m;
  m.scale = detail::require_number(v, "scale", path);
  if (m.scale <= 0.0) throw SchemaError("scale must be positive", detail::join(path, "scale"));
  const auto offset =
      read_pair(detail::require_field(v, "offset", path), detail::join(path, "offset"));
  m.offset_x = offset[0];
  m.offset_z = offset[1];
  const json& jsize = detail::require_field(v, "image_size", path);
  const std::string size_path = detail::join(path, "image_size");
  detail::require_array(jsize, size_path);
  if (jsize.size() != 2) throw SchemaError("expected 2 elements", size_path);
  const std::int64_t w = detail::as_integer(jsize[0], detail::at_index(size_path, 0));
  const std::int64_t h = detail::as_integer(jsize[1], detail::at_index(size_path, 1));
  if (w < 1 || h < 1) throw SchemaError("image_size must be positive", size_path);
  m.image_width = static_cast<int>(w);
  m.image_height = static_cast<int>(h);
  return m;
}

bool overlaps_extent(const Box2D& fp, const OccupancyGrid& g) {
  return fp.x_max >= g.extent_x_min() && fp.x_min <= g.extent_x_max() &&
         fp.z_max >= g.extent_z_min() && fp.z_min <= g.extent_z_max();
}

}  // namespace

SceneAnnotation parse_scene(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  detail::require_object(root, "");
  detail::reject_unknown_keys(root, {"scene_id", "objects", "grid", "floorplan"}, "");

  SceneAnnotation scene;
  scene.scene_id = detail::require_string(root, "scene_id", "");
  if (scene.scene_id.empty()) throw SchemaError("scene_id must be non-empty", "scene_id");

  const json& jobjects = detail::require_field(root, "objects", "");
  detail::require_array(jobjects, "objects");
  for (std::size_t i = 0; i < jobjects.size(); ++i) {
    scene.objects.push_back(read_object(jobjects[i], detail::at_index("objects", i)));
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.objects.size(); ++j) {
      if (scene.objects[i].id == scene.objects[j].id) {
        throw GeometryError("duplicate object id '" + scene.objects[i].id + "'",
                            detail::at_index("objects", j));
      }
    }
  }

  scene.grid = read_grid(detail::require_field(root, "grid", ""), "grid");
  scene.floorplan = read_floorplan(detail::require_field(root, "floorplan", ""), "floorplan");

  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    if (!overlaps_extent(scene.objects[i].box.footprint(), scene.grid)) {
      throw GeometryError("object '" + scene.objects[i].id + "' lies outside the mapped extent",
                          detail::at_index("objects", i));
    }
  }
  return scene;
}

std::string serialize_scene(const SceneAnnotation& scene) {
  json root = json::object();
  root["scene_id"] = scene.scene_id;
  json jobjects = json::array();
  for (const auto& o : scene.objects) {
    json jo = json::object();
    jo["id"] = o.id;
    jo["semantic"] = o.semantic;
    jo["box"] = {{"x", {o.box.x_min, o.box.x_max}},
                 {"y", {o.box.y_min, o.box.y_max}},
                 {"z", {o.box.z_min, o.box.z_max}}};
    jobjects.push_back(std::move(jo));
  }
  root["objects"] = std::move(jobjects);

  const OccupancyGrid& g = scene.grid;
  json jgrid = json::object();
  jgrid["resolution"] = g.resolution();
  jgrid["origin"] = {g.origin().x, g.origin().y, g.origin().z};
  jgrid["width"] = g.width();
  jgrid["height"] = g.height();
  json jrows = json::array();
  for (int r = 0; r < g.height(); ++r) {
    std::string row(static_cast<std::size_t>(g.width()), '#');
    for (int c = 0; c < g.width(); ++c) {
      if (g.navigable({c, r})) row[static_cast<std::size_t>(c)] = '.';
    }
    jrows.push_back(std::move(row));
  }
  jgrid["rows"] = std::move(jrows);
  root["grid"] = std::move(jgrid);

  root["floorplan"] = {{"scale", scene.floorplan.scale},
                       {"offset", {scene.floorplan.offset_x, scene.floorplan.offset_z}},
                       {"image_size", {scene.floorplan.image_width, scene.floorplan.image_height}}};
  return detail::canonical_dump(root);
}

}  // namespace cognav
