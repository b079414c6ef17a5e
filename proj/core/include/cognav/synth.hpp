#pragma once

#include <cstdint>

#include "cognav/scene.hpp"

namespace cognav {

// Deterministic bundled scenes, index 1..3:
//   1: two-room apartment, 8x6 m, 80x60 grid, 12 objects.
//   2: three-room apartment, 10x7 m, 100x70 grid, 14 objects.
//   3: zigzag corridor hall, 14x5 m, 140x50 grid, 8 objects.
// Object footprints and interior walls are blocked in the grid; every scene
// serializes canonically and round-trips through parse_scene.
SceneAnnotation fixture_scene(int index);

// Grid with independently blocked cells (probability block_fraction) for
// randomized planner trials. Cell (0, 0) is forced navigable when the draw
// blocks everything. Origin is the world origin.
OccupancyGrid random_obstacle_grid(std::uint64_t seed, int width, int height,
                                   double block_fraction, double resolution = 0.1);

}  // namespace cognav
