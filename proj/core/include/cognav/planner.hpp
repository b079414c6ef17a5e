#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cognav/geometry.hpp"
#include "cognav/scene.hpp"

namespace cognav {

// Exact 8-connected path cost: counts of unit (axial) and sqrt(2) (diagonal)
// steps. Because sqrt(2) is irrational, two costs are equal iff both counts
// match, so comparisons never depend on floating-point summation order.
struct StepCost {
  std::int32_t axial = 0;
  std::int32_t diagonal = 0;

  double length(double resolution) const {
    return (static_cast<double>(axial) + static_cast<double>(diagonal) * 1.4142135623730951) *
           resolution;
  }
  friend bool operator==(const StepCost&, const StepCost&) = default;
};

// True iff a.axial + a.diagonal * sqrt(2) < b.axial + b.diagonal * sqrt(2),
// decided in integer arithmetic.
bool cost_less(const StepCost& a, const StepCost& b);

struct GridPath {
  std::vector<Cell> cells;
  double length_m = 0.0;
};

struct Waypoint {
  WorldPoint position;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct Trajectory {
  std::vector<Pose> poses;
};

// Shortest-path search with reusable buffers; cheap to call many times on the
// same grid. A* under unit/sqrt(2) step costs with the octile-distance
// heuristic. Equal-cost ties are deterministic: neighbors expand in the fixed
// order E, NE, N, NW, W, SW, S, SE and the open set breaks ties by insertion
// order.
//
// The open set is a monotone bucket (radix) queue over exact integer
// priorities key(A, D) = (A << 26) + round(D * sqrt(2) * 2^26), where A and D
// are the TOTAL axial and diagonal step counts of f = g + h (summed before
// scaling: per-part rounded keys are not additive and would order equal
// costs by rounding noise). Since sqrt(2) is irrational, equal true costs
// have identical (A, D) and hence identical keys. Distinct costs with
// A + D <= 2n differ by at least 1/(1 + 4 sqrt(2) n); scaled by 2^26 that
// exceeds 14 at the enforced 800k-cell cap versus a < 0.6 per-key rounding
// slop, so key order equals exact cost order and FIFO buckets realize the
// insertion-order tie-break. The octile heuristic is consistent, hence
// popped keys never decrease and the monotone queue is sound.
class PathPlanner {
 public:
  explicit PathPlanner(const OccupancyGrid& grid);

  // Throws BlockedEndpointError when a or b is blocked or out of bounds;
  // nullopt when no path exists.
  std::optional<GridPath> shortest_path(Cell a, Cell b);
  std::optional<StepCost> path_cost(Cell a, Cell b);

  const OccupancyGrid& grid() const { return *grid_; }

 private:
  struct OpenEntry {
    std::int64_t key;
    std::int32_t index;
  };

  std::optional<StepCost> search(Cell a, Cell b, bool want_path);

  const OccupancyGrid* grid_;
  std::vector<StepCost> g_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int64_t> best_key_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::int32_t> col_of_;
  std::vector<std::int32_t> row_of_;
  std::vector<std::uint8_t> side_mask_;
  std::vector<std::int64_t> diag_key_;
  std::vector<OpenEntry> buckets_[49];  // bit_width(key ^ last) <= 48 at the cell cap
  std::uint64_t nonempty_ = 0;
  std::size_t bucket0_head_ = 0;
  std::int64_t last_key_ = 0;
  std::uint32_t generation_ = 0;
  std::int32_t found_ = -1;
};

std::optional<GridPath> shortest_path(const OccupancyGrid& grid, Cell a, Cell b);

// Shortest traversable length between two world points: path length between
// the snapped cells plus both ground-plane snap offsets. Throws
// SnapFailureError when either point has no navigable cell within
// snap_radius; nullopt when the snapped cells are disconnected.
std::optional<double> geodesic_distance(const OccupancyGrid& grid, const WorldPoint& a,
                                        const WorldPoint& b, double snap_radius = 0.5);

// Nearest navigable cell center within `radius` meters of p (ground-plane
// Euclidean; ties broken by row-major cell order).
std::optional<Cell> snap_to_navigable(const OccupancyGrid& grid, const WorldPoint& p,
                                      double radius);

// Arc-length resampling of a path every `step` meters. The first and last
// path points are always included; consecutive waypoints are at most `step`
// apart. Waypoints carry y = agent_height.
std::vector<Waypoint> discretize(const OccupancyGrid& grid, const GridPath& path, double step,
                                 double agent_height = 0.8);

// Visits n uniformly sampled navigable cells (seeded) in order via shortest
// paths, with an 8-pose 45-degree in-place scan at each waypoint. Travel
// poses face the movement direction. A waypoint unreachable from the current
// position is resampled up to 10 times before the tour fails.
Trajectory exploration_tour(const OccupancyGrid& grid, int n_waypoints, std::uint64_t seed,
                            double agent_height = 0.8);

}  // namespace cognav
