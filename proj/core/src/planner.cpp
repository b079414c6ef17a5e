#include "cognav/planner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "cognav/errors.hpp"
#include "cognav/rng.hpp"

namespace cognav {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Fixed expansion order: E, NE, N, NW, W, SW, S, SE in (dcol, drow), with
// north along +row (world +Z).
constexpr int kNeighborDc[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kNeighborDr[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// In-bounds sides each move needs: bit 1 = col+1 valid, 2 = row+1,
// 4 = col-1, 8 = row-1.
constexpr unsigned kNeedSides[8] = {1, 3, 2, 6, 4, 12, 8, 9};

constexpr int kKeyShift = 26;
constexpr double kSqrt2Key = kSqrt2 * 67108864.0;  // sqrt(2) * 2^26
constexpr std::size_t kMaxCells = 800000;          // keeps integer keys exact
constexpr std::uint32_t kBlockedStamp = 0xFFFFFFFFu;

std::string cell_str(Cell c) {
  return "(" + std::to_string(c.col) + "," + std::to_string(c.row) + ")";
}

}  // namespace

bool cost_less(const StepCost& a, const StepCost& b) {
  // a.axial + a.diagonal*sqrt(2) < b.axial + b.diagonal*sqrt(2)
  // <=> da < dd*sqrt(2) with da = a.axial - b.axial, dd = b.diagonal - a.diagonal.
  const std::int64_t da = static_cast<std::int64_t>(a.axial) - b.axial;
  const std::int64_t dd = static_cast<std::int64_t>(b.diagonal) - a.diagonal;
  if (dd == 0) return da < 0;
  if (dd > 0) {
    if (da < 0) return true;
    return da * da < 2 * dd * dd;
  }
  if (da >= 0) return false;
  return da * da > 2 * dd * dd;
}

PathPlanner::PathPlanner(const OccupancyGrid& grid) : grid_(&grid) {
  const std::size_t cells = static_cast<std::size_t>(grid.width()) * grid.height();
  if (cells > kMaxCells) {
    throw GridError("grid exceeds the planner's 800k-cell exact-priority limit");
  }
  g_.resize(cells);
  parent_.resize(cells);
  best_key_.resize(cells);
  stamp_.resize(cells);
  col_of_.resize(cells);
  row_of_.resize(cells);
  side_mask_.resize(cells);
  const int w = grid.width();
  const int h = grid.height();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      stamp_[i] = grid.navigable({c, r}) ? 0 : kBlockedStamp;
      col_of_[i] = c;
      row_of_[i] = r;
      side_mask_[i] = (c + 1 < w ? 1u : 0u) | (r + 1 < h ? 2u : 0u) | (c > 0 ? 4u : 0u) |
                      (r > 0 ? 8u : 0u);
    }
  }
  // Covers every combined diagonal count: path steps (< cells) plus the
  // heuristic's min-axis component (< min(w, h)).
  diag_key_.resize(cells + static_cast<std::size_t>(std::min(w, h)) + 2);
  for (std::size_t m = 0; m < diag_key_.size(); ++m) {
    diag_key_[m] = static_cast<std::int64_t>(static_cast<double>(m) * kSqrt2Key + 0.5);
  }
}

std::optional<StepCost> PathPlanner::search(Cell a, Cell b, bool want_path) {
  const OccupancyGrid& grid = *grid_;
  if (!grid.navigable(a)) throw BlockedEndpointError("start cell is not navigable", cell_str(a));
  if (!grid.navigable(b)) throw BlockedEndpointError("goal cell is not navigable", cell_str(b));

  // Two stamp values per search: gen marks open cells, gen+1 closed ones.
  // Blocked cells carry a permanent sentinel set in the constructor.
  if (generation_ >= kBlockedStamp - 3) {
    for (std::uint32_t& s : stamp_) {
      if (s != kBlockedStamp) s = 0;
    }
    generation_ = 0;
  }
  generation_ += 2;
  const std::uint32_t gen = generation_;

  const int width = grid.width();
  const std::int32_t target = static_cast<std::int32_t>(b.row) * width + b.col;
  found_ = -1;

  // Flat-index deltas in expansion order.
  const std::int32_t off[8] = {1,      width + 1,  width,  width - 1,
                               -1,     -width - 1, -width, -width + 1};
  const std::int64_t* dk = diag_key_.data();
  // Octile heuristic step counts toward the target: |max-min| axial moves and
  // min diagonal moves. The priority key is built from the g+h TOTALS, never
  // from per-part rounded keys: dk[x] + dk[y] can differ from dk[x + y] by 1,
  // which would order equal-cost entries by rounding noise instead of
  // insertion order.
  const auto heuristic_steps = [b](int col, int row) -> StepCost {
    const int dx0 = col - b.col;
    const int dz0 = row - b.row;
    const int dx = dx0 < 0 ? -dx0 : dx0;
    const int dz = dz0 < 0 ? -dz0 : dz0;
    const int mn = dx < dz ? dx : dz;
    const int mx = dx > dz ? dx : dz;
    return {mx - mn, mn};
  };
  const auto make_key = [dk](StepCost g, StepCost h) -> std::int64_t {
    return (static_cast<std::int64_t>(g.axial + h.axial) << kKeyShift) +
           dk[static_cast<std::size_t>(g.diagonal) + h.diagonal];
  };

  std::uint64_t pending = nonempty_;
  while (pending) {
    const unsigned bi = static_cast<unsigned>(std::countr_zero(pending));
    pending &= pending - 1;
    buckets_[bi].clear();
  }
  nonempty_ = 0;
  bucket0_head_ = 0;

  const auto push_open = [&](std::int64_t key, std::int32_t index) {
    const unsigned bi =
        key == last_key_
            ? 0u
            : static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(key ^ last_key_)));
    buckets_[bi].push_back({key, index});
    nonempty_ |= 1ull << bi;
  };

  const std::int32_t start = static_cast<std::int32_t>(a.row) * width + a.col;
  g_[static_cast<std::size_t>(start)] = {0, 0};
  parent_[static_cast<std::size_t>(start)] = -1;
  const std::int64_t start_key = make_key({0, 0}, heuristic_steps(a.col, a.row));
  best_key_[static_cast<std::size_t>(start)] = start_key;
  stamp_[static_cast<std::size_t>(start)] = gen;
  last_key_ = start_key;
  push_open(start_key, start);

  for (;;) {
    if (bucket0_head_ >= buckets_[0].size()) {
      buckets_[0].clear();
      bucket0_head_ = 0;
      nonempty_ &= ~1ull;
      if (!nonempty_) return std::nullopt;
      // Advance the monotone front: the next minimum seeds bucket 0 and the
      // rest of its bucket redistributes strictly downward, preserving
      // insertion order among equal keys.
      const unsigned k = static_cast<unsigned>(std::countr_zero(nonempty_));
      std::vector<OpenEntry>& bk = buckets_[k];
      std::int64_t mn = bk.front().key;
      for (const OpenEntry& e : bk) mn = e.key < mn ? e.key : mn;
      last_key_ = mn;
      for (const OpenEntry& e : bk) {
        const unsigned bi =
            e.key == mn
                ? 0u
                : static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(e.key ^ mn)));
        buckets_[bi].push_back(e);
        nonempty_ |= 1ull << bi;
      }
      bk.clear();
      nonempty_ &= ~(1ull << k);
      continue;
    }
    const OpenEntry top = buckets_[0][bucket0_head_++];
    const std::int32_t ti = top.index;
    const std::size_t tu = static_cast<std::size_t>(ti);
    if (stamp_[tu] != gen || top.key != best_key_[tu]) continue;  // closed or superseded
    stamp_[tu] = gen + 1;
    if (ti == target) {
      found_ = target;
      return g_[tu];
    }
    const StepCost cg = g_[tu];
    const int cc = col_of_[tu];
    const int cr = row_of_[tu];
    const unsigned ok = side_mask_[tu];
    for (int n = 0; n < 8; ++n) {
      if ((ok & kNeedSides[n]) != kNeedSides[n]) continue;
      const std::size_t ni = static_cast<std::size_t>(ti + off[n]);
      const std::uint32_t sn = stamp_[ni];
      if (sn == kBlockedStamp || sn == gen + 1) continue;
      const bool diagonal = kNeighborDc[n] != 0 && kNeighborDr[n] != 0;
      StepCost ng = cg;
      if (diagonal) {
        ++ng.diagonal;
      } else {
        ++ng.axial;
      }
      if (sn == gen && !cost_less(ng, g_[ni])) continue;
      stamp_[ni] = gen;
      g_[ni] = ng;
      if (want_path) parent_[ni] = ti;
      const std::int64_t key =
          make_key(ng, heuristic_steps(cc + kNeighborDc[n], cr + kNeighborDr[n]));
      best_key_[ni] = key;
      push_open(key, static_cast<std::int32_t>(ni));
    }
  }
}

std::optional<GridPath> PathPlanner::shortest_path(Cell a, Cell b) {
  const auto cost = search(a, b, true);
  if (!cost) return std::nullopt;
  GridPath path;
  path.length_m = cost->length(grid_->resolution());
  const int width = grid_->width();
  for (std::int32_t i = found_; i != -1; i = parent_[static_cast<std::size_t>(i)]) {
    path.cells.push_back({i % width, i / width});
  }
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

std::optional<StepCost> PathPlanner::path_cost(Cell a, Cell b) { return search(a, b, false); }

std::optional<GridPath> shortest_path(const OccupancyGrid& grid, Cell a, Cell b) {
  PathPlanner planner(grid);
  return planner.shortest_path(a, b);
}

std::optional<Cell> snap_to_navigable(const OccupancyGrid& grid, const WorldPoint& p,
                                      double radius) {
  if (radius < 0.0) throw ConfigError("snap radius must be non-negative");
  const Cell approx = grid.nearest_cell(p);
  const int reach = static_cast<int>(std::ceil(radius / grid.resolution())) + 1;
  std::optional<Cell> best;
  double best_d = radius;
  // Row-major scan; strict improvement keeps the first cell among ties.
  for (int r = approx.row - reach; r <= approx.row + reach; ++r) {
    for (int c = approx.col - reach; c <= approx.col + reach; ++c) {
      const Cell cell{c, r};
      if (!grid.navigable(cell)) continue;
      const double d = ground_distance(p, grid.cell_center(cell));
      if (d > radius) continue;
      if (!best || d < best_d) {
        best = cell;
        best_d = d;
      }
    }
  }
  return best;
}

std::optional<double> geodesic_distance(const OccupancyGrid& grid, const WorldPoint& a,
                                        const WorldPoint& b, double snap_radius) {
  const auto ca = snap_to_navigable(grid, a, snap_radius);
  if (!ca) throw SnapFailureError("no navigable cell within snap radius", "a");
  const auto cb = snap_to_navigable(grid, b, snap_radius);
  if (!cb) throw SnapFailureError("no navigable cell within snap radius", "b");
  PathPlanner planner(grid);
  const auto cost = planner.path_cost(*ca, *cb);
  if (!cost) return std::nullopt;
  return ground_distance(a, grid.cell_center(*ca)) + cost->length(grid.resolution()) +
         ground_distance(grid.cell_center(*cb), b);
}

std::vector<Waypoint> discretize(const OccupancyGrid& grid, const GridPath& path, double step,
                                 double agent_height) {
  if (step <= 0.0) throw ConfigError("discretization step must be positive");
  if (path.cells.empty()) return {};
  std::vector<WorldPoint> pts;
  pts.reserve(path.cells.size());
  for (Cell c : path.cells) {
    WorldPoint p = grid.cell_center(c);
    p.y = agent_height;
    pts.push_back(p);
  }
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cum[i] = cum[i - 1] + ground_distance(pts[i - 1], pts[i]);
  }
  const double total = cum.back();

  std::vector<Waypoint> out;
  std::size_t seg = 1;
  for (int k = 0;; ++k) {
    const double t = static_cast<double>(k) * step;
    if (t >= total) break;
    while (seg < cum.size() && cum[seg] <= t) ++seg;
    // t lies in [cum[seg-1], cum[seg]).
    const double span = cum[seg] - cum[seg - 1];
    const double u = span > 0.0 ? (t - cum[seg - 1]) / span : 0.0;
    const WorldPoint& p0 = pts[seg - 1];
    const WorldPoint& p1 = pts[seg];
    out.push_back({{p0.x + u * (p1.x - p0.x), agent_height, p0.z + u * (p1.z - p0.z)}});
  }
  out.push_back({pts.back()});
  return out;
}

Trajectory exploration_tour(const OccupancyGrid& grid, int n_waypoints, std::uint64_t seed,
                            double agent_height) {
  if (n_waypoints < 1) throw ConfigError("n_waypoints must be at least 1");
  std::vector<Cell> navigable;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.navigable({c, r})) navigable.push_back({c, r});
    }
  }
  if (navigable.empty()) throw GridError("grid has no navigable cell");

  Rng rng(seed);
  PathPlanner planner(grid);
  Trajectory tour;
  const auto pose_at = [&](Cell c, double yaw) {
    WorldPoint p = grid.cell_center(c);
    p.y = agent_height;
    tour.poses.push_back({p, normalize_deg(yaw)});
  };
  const auto scan_at = [&](Cell c) {
    for (int i = 0; i < 8; ++i) pose_at(c, 45.0 * i);
  };

  Cell current = navigable[rng.index(navigable.size())];
  pose_at(current, 0.0);
  scan_at(current);
  for (int w = 1; w < n_waypoints; ++w) {
    std::optional<GridPath> path;
    for (int attempt = 0; attempt < 10 && !path; ++attempt) {
      const Cell candidate = navigable[rng.index(navigable.size())];
      path = planner.shortest_path(current, candidate);
    }
    if (!path) throw GridError("sampled waypoint unreachable after 10 resamples");
    for (std::size_t i = 1; i < path->cells.size(); ++i) {
      const Cell from = path->cells[i - 1];
      const Cell to = path->cells[i];
      const double yaw = azimuth_deg((to.col - from.col) * grid.resolution(),
                                     (to.row - from.row) * grid.resolution());
      pose_at(to, yaw);
    }
    current = path->cells.back();
    scan_at(current);
  }
  return tour;
}

}  // namespace cognav
