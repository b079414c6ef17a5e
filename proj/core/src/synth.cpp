#include "cognav/synth.hpp"

#include <string>
#include <vector>

#include "cognav/errors.hpp"
#include "cognav/rng.hpp"

namespace cognav {

namespace {

// Accumulates blocked rectangles, then bakes the navigable mask. Cell (c, r)
// has its center at origin + (c, r) * resolution.
class GridBuilder {
 public:
  GridBuilder(int width, int height, double resolution, WorldPoint origin)
      : width_(width), height_(height), resolution_(resolution), origin_(origin),
        cells_(static_cast<std::size_t>(width) * height, 1) {}

  void block_rect(double x_min, double x_max, double z_min, double z_max) {
    for (int r = 0; r < height_; ++r) {
      const double cz = origin_.z + r * resolution_;
      if (cz <= z_min || cz >= z_max) continue;
      for (int c = 0; c < width_; ++c) {
        const double cx = origin_.x + c * resolution_;
        if (cx <= x_min || cx >= x_max) continue;
        cells_[static_cast<std::size_t>(r) * width_ + c] = 0;
      }
    }
  }

  OccupancyGrid build() const {
    return OccupancyGrid(resolution_, origin_, width_, height_, cells_);
  }

 private:
  int width_;
  int height_;
  double resolution_;
  WorldPoint origin_;
  std::vector<std::uint8_t> cells_;
};

ObjectInstance object(std::string id, std::string semantic, double x_min, double x_max,
                      double y_min, double y_max, double z_min, double z_max) {
  ObjectInstance o;
  o.id = std::move(id);
  o.semantic = std::move(semantic);
  o.box = {x_min, x_max, y_min, y_max, z_min, z_max};
  return o;
}

SceneAnnotation finish(std::string scene_id, std::vector<ObjectInstance> objects,
                       GridBuilder& builder, int image_width, int image_height) {
  for (const ObjectInstance& o : objects) {
    if (o.semantic == "floor") continue;
    builder.block_rect(o.box.x_min, o.box.x_max, o.box.z_min, o.box.z_max);
  }
  SceneAnnotation scene;
  scene.scene_id = std::move(scene_id);
  scene.objects = std::move(objects);
  scene.grid = builder.build();
  scene.floorplan = {50.0, 0.0, 0.0, image_width, image_height};
  return scene;
}

SceneAnnotation apartment_01() {
  GridBuilder builder(80, 60, 0.1, {0.05, 0.0, 0.05});
  // Interior wall splitting the left and right rooms, door gap z in [2.6, 3.4].
  builder.block_rect(3.9, 4.1, 0.0, 2.6);
  builder.block_rect(3.9, 4.1, 3.4, 6.0);

  std::vector<ObjectInstance> objects;
  objects.push_back(object("o01", "floor", 0.0, 8.0, -0.05, 0.0, 0.0, 6.0));
  objects.push_back(object("o02", "sofa", 1.0, 3.2, 0.0, 0.9, 2.0, 3.1));
  objects.push_back(object("o03", "bed", 5.2, 7.2, 0.0, 0.6, 0.6, 2.4));
  objects.push_back(object("o04", "dining table", 0.6, 2.2, 0.0, 0.75, 4.2, 5.4));
  objects.push_back(object("o05", "desk", 6.0, 7.6, 0.0, 0.75, 4.4, 5.2));
  objects.push_back(object("o06", "wardrobe", 4.4, 5.0, 0.0, 1.9, 0.4, 2.0));
  objects.push_back(object("o07", "bookshelf", 0.2, 1.2, 0.0, 1.8, 0.3, 0.9));
  objects.push_back(object("o08", "coffee table", 1.6, 2.6, 0.0, 0.45, 3.4, 3.9));
  objects.push_back(object("o09", "lamp", 7.3, 7.6, 0.75, 1.2, 4.5, 4.8));
  objects.push_back(object("o10", "vase", 0.6, 0.8, 0.75, 1.1, 4.6, 4.8));
  objects.push_back(object("o11", "cushion", 1.4, 1.9, 0.4, 0.6, 2.7, 3.1));
  objects.push_back(object("o12", "plant", 3.0, 3.4, 0.0, 0.8, 5.3, 5.7));
  return finish("synthetic_apartment_01", std::move(objects), builder, 400, 300);
}

SceneAnnotation apartment_02() {
  GridBuilder builder(100, 70, 0.1, {0.05, 0.0, 0.05});
  // Kitchen | living | bedroom walls; doors at z [1.0, 1.8] and [5.2, 6.0].
  builder.block_rect(3.2, 3.4, 0.0, 1.0);
  builder.block_rect(3.2, 3.4, 1.8, 7.0);
  builder.block_rect(6.6, 6.8, 0.0, 5.2);
  builder.block_rect(6.6, 6.8, 6.0, 7.0);

  std::vector<ObjectInstance> objects;
  objects.push_back(object("b01", "floor", 0.0, 10.0, -0.05, 0.0, 0.0, 7.0));
  objects.push_back(object("b02", "fridge", 0.3, 1.1, 0.0, 1.9, 0.3, 1.1));
  objects.push_back(object("b03", "counter", 0.2, 3.0, 0.0, 0.9, 6.2, 6.8));
  objects.push_back(object("b04", "kitchen table", 1.2, 2.4, 0.0, 0.75, 3.0, 4.2));
  objects.push_back(object("b05", "stove", 2.2, 3.0, 0.0, 0.9, 0.3, 1.0));
  objects.push_back(object("b06", "sofa", 3.8, 5.8, 0.0, 0.85, 5.6, 6.5));
  objects.push_back(object("b07", "tv stand", 4.0, 5.6, 0.0, 0.5, 0.3, 0.7));
  objects.push_back(object("b08", "armchair", 6.0, 6.5, 0.0, 0.8, 4.6, 5.4));
  objects.push_back(object("b09", "bookcase", 3.6, 4.2, 0.0, 1.9, 2.4, 3.6));
  objects.push_back(object("b10", "bed", 7.4, 9.4, 0.0, 0.6, 0.4, 2.2));
  objects.push_back(object("b11", "dresser", 9.0, 9.8, 0.0, 1.1, 3.0, 4.4));
  objects.push_back(object("b12", "desk", 7.0, 8.6, 0.0, 0.75, 5.6, 6.4));
  objects.push_back(object("b13", "kettle", 2.3, 2.5, 0.9, 1.15, 0.3, 0.5));
  objects.push_back(object("b14", "nightstand", 7.4, 7.9, 0.0, 0.55, 2.4, 2.9));
  return finish("synthetic_apartment_02", std::move(objects), builder, 500, 350);
}

SceneAnnotation apartment_03() {
  GridBuilder builder(140, 50, 0.1, {0.05, 0.0, 0.05});
  // Zigzag hall: wall A passable only along the top, wall B only along the
  // bottom, forcing an S-shaped route end to end.
  builder.block_rect(3.6, 3.8, 0.0, 3.0);
  builder.block_rect(8.6, 8.8, 2.0, 5.0);

  std::vector<ObjectInstance> objects;
  objects.push_back(object("c01", "floor", 0.0, 14.0, -0.05, 0.0, 0.0, 5.0));
  objects.push_back(object("c02", "locker", 0.3, 1.1, 0.0, 1.8, 0.3, 1.5));
  objects.push_back(object("c03", "bench", 4.0, 5.8, 0.0, 0.45, 4.2, 4.8));
  objects.push_back(object("c04", "plant stand", 7.0, 7.4, 0.0, 1.0, 0.3, 0.7));
  objects.push_back(object("c05", "cabinet", 9.6, 10.4, 0.0, 1.6, 4.0, 4.8));
  objects.push_back(object("c06", "crate", 12.8, 13.6, 0.0, 0.8, 0.4, 1.3));
  objects.push_back(object("c07", "fire extinguisher", 13.2, 13.4, 0.2, 0.8, 4.5, 4.7));
  objects.push_back(object("c08", "box", 13.0, 13.3, 0.8, 1.1, 0.4, 0.7));
  return finish("synthetic_apartment_03", std::move(objects), builder, 700, 250);
}

}  // namespace

SceneAnnotation fixture_scene(int index) {
  switch (index) {
    case 1:
      return apartment_01();
    case 2:
      return apartment_02();
    case 3:
      return apartment_03();
    default:
      throw ConfigError("fixture scene index must be 1, 2, or 3, got " +
                        std::to_string(index));
  }
}

OccupancyGrid random_obstacle_grid(std::uint64_t seed, int width, int height,
                                   double block_fraction, double resolution) {
  if (width < 1 || height < 1) throw ConfigError("grid dimensions must be >= 1");
  if (!(block_fraction >= 0.0) || block_fraction >= 1.0) {
    throw ConfigError("block_fraction must be in [0, 1)");
  }
  if (!(resolution > 0.0)) throw ConfigError("resolution must be > 0");
  Rng rng(seed);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(width) * height);
  bool any = false;
  for (std::uint8_t& c : cells) {
    c = rng.real01() >= block_fraction ? 1 : 0;
    any = any || c != 0;
  }
  if (!any) cells[0] = 1;
  return OccupancyGrid(resolution, {0.0, 0.0, 0.0}, width, height, std::move(cells));
}

}  // namespace cognav
