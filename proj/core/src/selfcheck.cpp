#include "cognav/selfcheck.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cognav/codec.hpp"
#include "cognav/cogmap.hpp"
#include "cognav/cogrs.hpp"
#include "cognav/commands.hpp"
#include "cognav/errors.hpp"
#include "cognav/metrics.hpp"
#include "cognav/planner.hpp"
#include "cognav/rng.hpp"
#include "cognav/spectral.hpp"
#include "cognav/synth.hpp"
#include "cognav/tasks.hpp"

namespace cognav {

namespace {

struct CheckOutcome {
  bool passed = false;
  std::string detail;
};

std::string format_count(long long n) { return std::to_string(n); }

// Uniform-cost search over the same 8-connected moves as the planner, with
// no heuristic and no early exit; the comparison oracle for check 1. Scratch
// buffers persist across from() calls on the same grid.
class UcsOracle {
 public:
  explicit UcsOracle(const OccupancyGrid& grid) : grid_(&grid) {
    const std::size_t total = static_cast<std::size_t>(grid.width()) * grid.height();
    dist_.resize(total);
    done_.resize(total);
  }

  const std::vector<std::optional<StepCost>>& from(Cell src) {
    static constexpr int kDc[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int kDr[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    const OccupancyGrid& grid = *grid_;
    const int w = grid.width();
    std::fill(dist_.begin(), dist_.end(), std::nullopt);
    std::fill(done_.begin(), done_.end(), 0);
    struct Entry {
      StepCost g;
      std::int32_t index;
    };
    const auto lower_priority = [](const Entry& a, const Entry& b) {
      return cost_less(b.g, a.g);
    };
    std::vector<Entry> open;
    open.reserve(2048);
    const auto at = [w](Cell c) {
      return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(w) + c.col;
    };
    dist_[at(src)] = StepCost{};
    open.push_back({StepCost{}, static_cast<std::int32_t>(at(src))});
    while (!open.empty()) {
      std::pop_heap(open.begin(), open.end(), lower_priority);
      const Entry e = open.back();
      open.pop_back();
      if (done_[e.index]) continue;
      done_[e.index] = 1;
      const Cell cur{e.index % w, e.index / w};
      for (int n = 0; n < 8; ++n) {
        const Cell next{cur.col + kDc[n], cur.row + kDr[n]};
        if (!grid.navigable(next)) continue;
        StepCost ng = e.g;
        if (kDc[n] != 0 && kDr[n] != 0) {
          ++ng.diagonal;
        } else {
          ++ng.axial;
        }
        auto& slot = dist_[at(next)];
        if (!slot || cost_less(ng, *slot)) {
          slot = ng;
          open.push_back({ng, static_cast<std::int32_t>(at(next))});
          std::push_heap(open.begin(), open.end(), lower_priority);
        }
      }
    }
    return dist_;
  }

 private:
  const OccupancyGrid* grid_;
  std::vector<std::optional<StepCost>> dist_;
  std::vector<std::uint8_t> done_;
};

// 1: A* cost equals the uniform-cost oracle on every solvable pair of
// navigable cells of 100 seeded 20x20 grids with 30% obstacles, within a
// 10 s budget. One disconnected pair per grid additionally probes that the
// planner agrees on unreachability.
CheckOutcome check_planner_oracle() {
  const auto start = std::chrono::steady_clock::now();
  constexpr int kGrids = 100;
  std::atomic<long long> pairs{0};
  std::atomic<int> failures{0};
  std::mutex detail_mutex;
  std::string failure_detail;

  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned nthreads = std::min(8u, std::max(1u, hw));
  const auto work = [&](unsigned tid) {
    for (int g = static_cast<int>(tid); g < kGrids; g += static_cast<int>(nthreads)) {
      if (failures.load() > 0) return;
      const OccupancyGrid grid = random_obstacle_grid(1000 + g, 20, 20, 0.3);
      std::vector<Cell> cells;
      for (int r = 0; r < grid.height(); ++r) {
        for (int c = 0; c < grid.width(); ++c) {
          if (grid.navigable({c, r})) cells.push_back({c, r});
        }
      }
      PathPlanner planner(grid);
      UcsOracle ucs(grid);
      long long local = 0;
      bool probed_disconnected = false;
      const auto report = [&](Cell from, Cell to, bool want_reachable, bool got_reachable) {
        ++failures;
        std::lock_guard<std::mutex> lock(detail_mutex);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "grid %d (%d,%d)->(%d,%d): oracle %s, planner %s", g,
                      from.col, from.row, to.col, to.row,
                      want_reachable ? "reachable" : "unreachable",
                      got_reachable ? "reachable" : "unreachable");
        failure_detail = buf;
      };
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& oracle = ucs.from(cells[i]);
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
          const std::size_t target =
              static_cast<std::size_t>(cells[j].row) * grid.width() + cells[j].col;
          const auto& want = oracle[target];
          if (!want) {
            // Disconnected pairs force A* to exhaust the component, so probe
            // agreement once per grid instead of on all of them.
            if (!probed_disconnected) {
              probed_disconnected = true;
              if (planner.path_cost(cells[i], cells[j]).has_value()) {
                report(cells[i], cells[j], false, true);
                return;
              }
            }
            continue;
          }
          const auto got = planner.path_cost(cells[i], cells[j]);
          ++local;
          if (!got || !(*want == *got)) {
            report(cells[i], cells[j], true, got.has_value());
            return;
          }
        }
      }
      pairs += local;
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < nthreads; ++t) threads.emplace_back(work, t);
  for (std::thread& t : threads) t.join();

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (failures.load() > 0) return {false, failure_detail};
  if (secs >= 10.0) {
    return {false, "exceeded the 10 s budget: " + std::to_string(secs) + " s"};
  }
  return {true, format_count(kGrids) + " grids, " + format_count(pairs.load()) +
                    " solvable pairs, all costs equal"};
}

// 2: feeding each generated task's ground-truth map and chain back through
// parse -> decode -> execute stays consistent: SR_p >= 95%, mean SPL >= 0.85,
// NE_waypoint < 1 m on every successful task, within a 60 s budget.
CheckOutcome check_groundtruth_roundtrip() {
  const auto start = std::chrono::steady_clock::now();
  constexpr int kPerScene[3] = {70, 70, 60};
  std::size_t total = 0;
  std::size_t executed = 0;
  std::size_t waypoint_violations = 0;
  double spl_sum = 0.0;
  try {
    for (int scene_index = 1; scene_index <= 3; ++scene_index) {
      const SceneAnnotation scene = fixture_scene(scene_index);
      const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
      EvalContext ctx;
      ctx.scene = &scene;
      ctx.gt_map = &map;
      for (int s = 0; s < kPerScene[scene_index - 1]; ++s) {
        const NavTask task =
            sample_task(scene, map, static_cast<std::uint64_t>(s), TaskConfig{});
        const ModelOutput output =
            parse_model_output(serialize_reference_output(map, task.gt_chain));
        const InstanceReport report = evaluate_instance(task, output, ctx);
        ++total;
        spl_sum += report.spl;
        if (report.sr_p) {
          ++executed;
          if (!(report.ne_wp && *report.ne_wp < 1.0)) ++waypoint_violations;
        }
      }
    }
  } catch (const Error& e) {
    return {false, std::string("pipeline error: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double sr_p = static_cast<double>(executed) / total;
  const double mean_spl = spl_sum / total;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%zu tasks, SR_p %.1f%%, mean SPL %.3f, %zu waypoint misses",
                total, 100.0 * sr_p, mean_spl, waypoint_violations);
  const bool ok = total >= 200 && sr_p >= 0.95 && mean_spl >= 0.85 &&
                  waypoint_violations == 0 && secs < 60.0;
  if (secs >= 60.0) {
    return {false, std::string(buf) + ", exceeded the 60 s budget"};
  }
  return {ok, buf};
}

// 3: closed-form metric values hold exactly.
CheckOutcome check_metric_exactness() {
  bool ok = true;
  std::string detail = "all closed-form values exact";
  const auto expect = [&](bool cond, const char* what) {
    if (!cond && ok) {
      ok = false;
      detail = std::string("failed: ") + what;
    }
  };
  expect(spl(true, 10.0, 20.0) == 0.5, "spl(1,10,20) == 0.5");
  expect(spl(true, 3.7, 3.7) == 1.0, "spl(1,s,s) == 1");
  expect(spl(true, 0.0, 0.0) == 1.0, "spl(1,0,0) == 1");
  expect(spl(false, 10.0, 20.0) == 0.0, "spl(0,10,20) == 0");
  expect(navigation_error({0.0, 0.0, 0.0}, {3.0, 0.0, 4.0}) == 5.0, "ne((0,0),(3,4)) == 5");
  const double at_threshold = navigation_error({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  expect(!(at_threshold < 1.0), "sr_t false at exactly 1 m");
  const double below = std::nextafter(1.0, 0.0);
  expect(navigation_error({0.0, 0.0, 0.0}, {below, 0.0, 0.0}) < 1.0,
         "sr_t true just below 1 m");
  return {ok, detail};
}

Landmark make_landmark(std::string id, std::string semantic, double cx, double cz, double hx,
                       double hz) {
  Landmark lm;
  lm.id = std::move(id);
  lm.semantic = std::move(semantic);
  lm.bbox = {cx - hx, cx + hx, cz - hz, cz + hz};
  lm.source_object = lm.id;
  return lm;
}

// 4: greedy matching reproduces the exhaustive maximum-total-IoU assignment
// on 500 randomized layouts with <= 6 ground-truth landmarks.
CheckOutcome check_matching_oracle() {
  static const char* kSemantics[6] = {"sofa", "bed", "table", "desk", "chair", "shelf"};
  for (int trial = 0; trial < 500; ++trial) {
    Rng rng(2000 + trial);
    const std::size_t n_gt = 1 + rng.index(6);

    // 4x4 slot lattice, 6 m spacing; box reach stays under half the spacing
    // so a prediction can only overlap the truth it was jittered from.
    std::vector<int> slots(16);
    for (int i = 0; i < 16; ++i) slots[i] = i;
    for (std::size_t i = slots.size() - 1; i > 0; --i) {
      std::swap(slots[i], slots[rng.index(i + 1)]);
    }

    CognitiveMap gt;
    CognitiveMap pred;
    std::size_t slot_cursor = 0;
    for (std::size_t g = 0; g < n_gt; ++g) {
      const int slot = slots[slot_cursor++];
      const double cx = (slot % 4) * 6.0 + rng.real(-0.5, 0.5);
      const double cz = (slot / 4) * 6.0 + rng.real(-0.5, 0.5);
      const double hx = rng.real(0.4, 1.0);
      const double hz = rng.real(0.4, 1.0);
      const std::string semantic = kSemantics[rng.index(6)];
      gt.landmarks.push_back(make_landmark("g" + std::to_string(g), semantic, cx, cz, hx, hz));
      const auto add_pred = [&] {
        const double px = cx + rng.real(-0.3, 0.3);
        const double pz = cz + rng.real(-0.3, 0.3);
        const double sx = hx * rng.real(0.85, 1.15);
        const double sz = hz * rng.real(0.85, 1.15);
        pred.landmarks.push_back(make_landmark("p" + std::to_string(pred.landmarks.size()),
                                               semantic, px, pz, sx, sz));
      };
      if (rng.real01() < 0.85) {
        add_pred();
        if (rng.real01() < 0.3) add_pred();
      }
    }
    const std::size_t spurious = rng.index(3);
    for (std::size_t s = 0; s < spurious; ++s) {
      const int slot = slots[slot_cursor++];
      const double cx = (slot % 4) * 6.0 + rng.real(-0.5, 0.5);
      const double cz = (slot / 4) * 6.0 + rng.real(-0.5, 0.5);
      pred.landmarks.push_back(make_landmark("p" + std::to_string(pred.landmarks.size()),
                                             kSemantics[rng.index(6)], cx, cz,
                                             rng.real(0.4, 1.0), rng.real(0.4, 1.0)));
    }

    const std::vector<MatchedPair> greedy = greedy_landmark_matching(pred, gt);
    double greedy_total = 0.0;
    std::set<std::pair<std::size_t, std::size_t>> greedy_pairs;
    for (const MatchedPair& m : greedy) {
      greedy_total += m.iou;
      greedy_pairs.insert({m.pred_index, m.gt_index});
    }

    // Exhaustive search over injective assignments of truths to candidate
    // predictions (same semantic, positive IoU).
    double best_total = -1.0;
    std::set<std::pair<std::size_t, std::size_t>> best_pairs;
    std::vector<char> used(pred.landmarks.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> current;
    double current_total = 0.0;
    const std::function<void(std::size_t)> recurse = [&](std::size_t g) {
      if (g == gt.landmarks.size()) {
        if (current_total > best_total) {
          best_total = current_total;
          best_pairs.clear();
          best_pairs.insert(current.begin(), current.end());
        }
        return;
      }
      recurse(g + 1);
      for (std::size_t p = 0; p < pred.landmarks.size(); ++p) {
        if (used[p] || pred.landmarks[p].semantic != gt.landmarks[g].semantic) continue;
        const double overlap = iou(pred.landmarks[p].bbox, gt.landmarks[g].bbox);
        if (!(overlap > 0.0)) continue;
        used[p] = 1;
        current.push_back({p, g});
        current_total += overlap;
        recurse(g + 1);
        current_total -= overlap;
        current.pop_back();
        used[p] = 0;
      }
    };
    recurse(0);

    if (greedy_pairs != best_pairs || std::abs(greedy_total - best_total) > 1e-9) {
      return {false, "trial " + std::to_string(trial) + ": greedy total " +
                         std::to_string(greedy_total) + ", oracle " +
                         std::to_string(best_total)};
    }
  }
  return {true, "500 layouts, greedy equals exhaustive assignment"};
}

// 5: affinity entries recompute within 1e-12, two 10-vs-10 blobs 20 m apart
// split perfectly for all 50 seeds, and Jacobi residuals stay under 1e-8.
CheckOutcome check_spectral() {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(3000 + trial);
    const std::size_t n = 2 + rng.index(9);
    std::vector<Landmark> landmarks;
    for (std::size_t i = 0; i < n; ++i) {
      landmarks.push_back(make_landmark("L" + std::to_string(i), "thing", rng.real(-10.0, 10.0),
                                        rng.real(-10.0, 10.0), 0.3, 0.3));
    }
    const AffinityMatrix a = affinity_matrix(landmarks);
    std::vector<double> nonzero;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = ground_distance(landmarks[i].bbox.center(), landmarks[j].bbox.center());
        if (d > 0.0) nonzero.push_back(d);
      }
    }
    std::sort(nonzero.begin(), nonzero.end());
    const std::size_t m = nonzero.size();
    const double sigma =
        m % 2 == 1 ? nonzero[m / 2] : 0.5 * (nonzero[m / 2 - 1] + nonzero[m / 2]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d =
            ground_distance(landmarks[i].bbox.center(), landmarks[j].bbox.center());
        const double want = i == j ? 0.0 : std::exp(-d * d / (2.0 * sigma * sigma));
        if (std::abs(a.values[i * n + j] - want) > 1e-12) {
          return {false, "affinity entry off by more than 1e-12 in trial " +
                             std::to_string(trial)};
        }
      }
    }
  }

  int perfect = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(7000 + seed);
    std::vector<Landmark> landmarks;
    for (int i = 0; i < 10; ++i) {
      landmarks.push_back(make_landmark("A" + std::to_string(i), "thing", rng.real(-1.0, 1.0),
                                        rng.real(-1.0, 1.0), 0.3, 0.3));
    }
    for (int i = 0; i < 10; ++i) {
      landmarks.push_back(make_landmark("B" + std::to_string(i), "thing",
                                        20.0 + rng.real(-1.0, 1.0), rng.real(-1.0, 1.0), 0.3,
                                        0.3));
    }
    const AffinityMatrix a = affinity_matrix(landmarks);
    const std::vector<int> labels = spectral_cluster(a.values, 20, 2, seed);
    bool split = labels[0] != labels[10];
    for (int i = 1; i < 10 && split; ++i) split = labels[i] == labels[0];
    for (int i = 11; i < 20 && split; ++i) split = labels[i] == labels[10];
    if (split) ++perfect;
  }
  if (perfect != 50) {
    return {false, "blob split perfect for only " + std::to_string(perfect) + "/50 seeds"};
  }

  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(8000 + trial);
    const int n = 12;
    std::vector<double> m(n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double v = rng.real(-1.0, 1.0);
        m[i * n + j] = v;
        m[j * n + i] = v;
      }
    }
    const EigenSystem es = jacobi_eigensystem(m, n);
    for (int k = 0; k < n; ++k) {
      double norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        double mv = 0.0;
        for (int j = 0; j < n; ++j) mv += m[i * n + j] * es.vectors[k][j];
        const double r = mv - es.values[k] * es.vectors[k][i];
        norm2 += r * r;
      }
      if (std::sqrt(norm2) >= 1e-8) {
        return {false, "eigen residual above 1e-8 in trial " + std::to_string(trial)};
      }
    }
  }
  return {true, "affinity within 1e-12, 50/50 blob splits, residuals below 1e-8"};
}

// 6: the compass bin of every tenth-degree bearing matches the integer
// oracle (boundaries round toward the larger azimuth), and decoding a
// (dir, dist) step then re-encoding it recovers the direction on all 10k
// dyadic triples and the distance exactly on axial ones; diagonal distances
// recompute within a 2e-14 summation bound.
CheckOutcome check_bearing_codec() {
  constexpr double kPi = 3.14159265358979323846;
  for (int t = 0; t < 3600; ++t) {
    const double rad = static_cast<double>(t) * 0.1 * kPi / 180.0;
    const DirBin want = static_cast<DirBin>(((t + 225) / 450) % 8);
    const DirBin got = bearing_bin(std::sin(rad), std::cos(rad));
    if (got != want) {
      return {false, "bearing mismatch at " + std::to_string(t / 10.0) + " degrees"};
    }
  }

  Rng rng(4000);
  for (int i = 0; i < 10000; ++i) {
    const double cx = static_cast<double>(rng.index(1281)) / 64.0 - 10.0;
    const double cz = static_cast<double>(rng.index(1281)) / 64.0 - 10.0;
    const double half = static_cast<double>(1 + rng.index(64)) / 64.0;
    const double dist = static_cast<double>(1 + rng.index(1216)) / 128.0;
    const DirBin dir = static_cast<DirBin>(rng.index(8));

    CognitiveMap map;
    map.landmarks.push_back(make_landmark("L0", "thing", cx, cz, half, half));
    PlanStep step;
    step.lm = "L0";
    step.sem = "thing";
    step.rel.dir = dir;
    step.rel.dist = dist;
    step.bbox = map.landmarks[0].bbox;
    const Waypoint wp = decode_step(map, step);

    const double dx = wp.position.x - cx;
    const double dz = wp.position.z - cz;
    if (bearing_bin(dx, dz) != dir) {
      return {false, "direction not recovered on triple " + std::to_string(i)};
    }
    const double re_dist = std::hypot(dx, dz);
    const bool axial = static_cast<int>(dir) % 2 == 0;
    if (axial) {
      if (re_dist != dist) {
        return {false, "axial distance not exact on triple " + std::to_string(i)};
      }
    } else if (std::abs(re_dist - dist) > 2e-14) {
      return {false, "diagonal distance outside 2e-14 on triple " + std::to_string(i)};
    }
  }
  return {true, "3600 bearings exact, 10k triples inverted (diagonals within 2e-14)"};
}

// 7: 10k adversarial inputs never escape parse_model_output, and exact
// reference serializations re-parse with both structures and zero issues.
CheckOutcome check_parser_fuzz() {
  SceneAnnotation scene;
  CognitiveMap map;
  std::string reference;
  try {
    scene = fixture_scene(1);
    map = build_cognitive_map(scene, MapConfig{}, 0);
    const NavTask task = sample_task(scene, map, 0, TaskConfig{});
    reference = serialize_reference_output(map, task.gt_chain);
  } catch (const Error& e) {
    return {false, std::string("fixture preparation failed: ") + e.what()};
  }

  static const char kGlyphs[] = "{}[]\":,xyz0123456789.eE+- \n\t\\";
  Rng rng(5000);
  std::size_t crashes = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    switch (rng.index(4)) {
      case 0: {
        const std::size_t len = rng.index(400);
        s.reserve(len);
        for (std::size_t b = 0; b < len; ++b) {
          s.push_back(static_cast<char>(rng.index(256)));
        }
        break;
      }
      case 1: {
        s = reference;
        const std::size_t muts = 1 + rng.index(10);
        for (std::size_t m = 0; m < muts; ++m) {
          s[rng.index(s.size())] = kGlyphs[rng.index(sizeof(kGlyphs) - 1)];
        }
        break;
      }
      case 2:
        s = reference.substr(0, rng.index(reference.size() + 1));
        break;
      default: {
        s = reference;
        const std::size_t inserts = 1 + rng.index(6);
        for (std::size_t m = 0; m < inserts; ++m) {
          s.insert(rng.index(s.size() + 1), 1, kGlyphs[rng.index(sizeof(kGlyphs) - 1)]);
        }
        break;
      }
    }
    try {
      const ModelOutput lenient = parse_model_output(s);
      const ModelOutput strict = parse_model_output(s, true);
      (void)lenient;
      (void)strict;
    } catch (...) {
      ++crashes;
    }
  }
  if (crashes > 0) {
    return {false, std::to_string(crashes) + " inputs escaped the parser"};
  }

  for (int s = 0; s < 30; ++s) {
    NavTask task;
    try {
      task = sample_task(scene, map, static_cast<std::uint64_t>(s), TaskConfig{});
    } catch (const Error& e) {
      return {false, std::string("sampling failed: ") + e.what()};
    }
    const ModelOutput out =
        parse_model_output(serialize_reference_output(map, task.gt_chain));
    if (!out.map || !out.chain || !out.issues.empty()) {
      return {false, "reference round-trip produced issues for task seed " + std::to_string(s)};
    }
  }
  return {true, "10k fuzz inputs contained, 30 reference round-trips clean"};
}

// 8: filter_band equals a brute-force recomputation on 1k synthetic records,
// uniform ln(0.5) spans hit perplexity 2.0 exactly, and nested bands keep
// nested sample sets.
CheckOutcome check_perplexity_filter() {
  Rng rng(6000);
  std::vector<TokenLogProbRecord> records;
  for (int i = 0; i < 1000; ++i) {
    TokenLogProbRecord rec;
    char id[16];
    std::snprintf(id, sizeof(id), "s%04d", i);
    rec.sample_id = id;
    const std::size_t ntok = 5 + rng.index(60);
    for (std::size_t t = 0; t < ntok; ++t) rec.tokens.push_back({"t", -5.0 * rng.real01()});
    const std::size_t nspans = 1 + rng.index(3);
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < nspans && cursor < ntok; ++k) {
      const std::size_t start = cursor + rng.index(ntok - cursor);
      if (start >= ntok) break;
      const std::size_t len = 1 + rng.index(std::min<std::size_t>(4, ntok - start));
      rec.critical_spans.push_back({start, start + len});
      cursor = start + len;
    }
    if (rec.critical_spans.empty()) rec.critical_spans.push_back({0, 1});
    records.push_back(std::move(rec));
  }

  std::vector<double> ppls;
  for (const TokenLogProbRecord& r : records) ppls.push_back(span_perplexity(r));
  const PerplexityBand band = percentile_band(ppls);
  const FilterOutcome outcome = filter_band(records, band);

  // Brute-force recomputation, written independently of filter_band.
  std::vector<KeptSample> brute_kept;
  std::size_t brute_below = 0;
  std::size_t brute_above = 0;
  for (const TokenLogProbRecord& r : records) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const TokenSpan& s : r.critical_spans) {
      for (std::size_t t = s.start; t < s.end; ++t) sum += r.tokens[t].logprob;
      n += s.end - s.start;
    }
    const double ppl = std::exp(-sum / static_cast<double>(n));
    if (ppl < band.tau_min) {
      ++brute_below;
    } else if (ppl > band.tau_max) {
      ++brute_above;
    } else {
      brute_kept.push_back({r.sample_id, ppl});
    }
  }
  std::sort(brute_kept.begin(), brute_kept.end(),
            [](const KeptSample& a, const KeptSample& b) { return a.sample_id < b.sample_id; });
  if (outcome.below != brute_below || outcome.above != brute_above ||
      outcome.kept != brute_kept) {
    return {false, "filter_band disagrees with the brute-force recomputation"};
  }

  const double half = std::log(0.5);
  TokenLogProbRecord one;
  one.sample_id = "u1";
  one.tokens = {{"t", half}};
  one.critical_spans = {{0, 1}};
  TokenLogProbRecord two;
  two.sample_id = "u2";
  two.tokens = {{"a", half}, {"b", half}, {"pad", 0.0}};
  two.critical_spans = {{0, 2}};
  if (span_perplexity(one) != 2.0 || span_perplexity(two) != 2.0) {
    return {false, "uniform ln(0.5) span did not give perplexity 2.0 exactly"};
  }

  std::vector<double> sorted = ppls;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = [&](double p) {
    const std::size_t r = static_cast<std::size_t>(
        std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
    return sorted[std::max<std::size_t>(1, std::min(r, sorted.size())) - 1];
  };
  const PerplexityBand inner{rank(50.0), rank(70.0)};
  const PerplexityBand mid{rank(45.0), rank(80.0)};
  const auto ids = [](const FilterOutcome& o) {
    std::set<std::string> s;
    for (const KeptSample& k : o.kept) s.insert(k.sample_id);
    return s;
  };
  const std::set<std::string> kept_inner = ids(filter_band(records, inner));
  const std::set<std::string> kept_mid = ids(filter_band(records, mid));
  const std::set<std::string> kept_outer = ids(outcome);
  const auto subset = [](const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  if (!subset(kept_inner, kept_mid) || !subset(kept_mid, kept_outer)) {
    return {false, "widening the band dropped a previously kept sample"};
  }
  return {true, "1k records match brute force, ppl(ln 0.5) == 2.0, bands monotone"};
}

// 9: difficulty bins [0,6), [6,10), [10,48] hold on the boundary values.
CheckOutcome check_strata() {
  const std::pair<double, Stratum> table[] = {
      {0.0, Stratum::Short},  {5.999, Stratum::Short}, {6.0, Stratum::Medium},
      {9.999, Stratum::Medium}, {10.0, Stratum::Long}, {48.0, Stratum::Long},
  };
  for (const auto& [length, want] : table) {
    if (stratum_of(length) != want) {
      return {false, "stratum_of(" + std::to_string(length) + ") wrong"};
    }
  }
  bool threw = false;
  try {
    stratum_of(48.001);
  } catch (const OutOfRangeError&) {
    threw = true;
  }
  if (!threw) return {false, "length beyond 48 m was not rejected"};
  return {true, "boundary values {0, 5.999, 6, 9.999, 10, 48} all binned correctly"};
}

std::optional<std::string> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 10: build-map and gen-tasks are byte-identical across two runs with the
// same seed and config.
CheckOutcome check_determinism() {
  namespace fs = std::filesystem;
  const fs::path tmp =
      fs::temp_directory_path() /
      ("cognav-selfcheck-" +
       std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  std::error_code ec;
  fs::create_directories(tmp, ec);
  if (ec) return {false, "cannot create scratch directory"};
  const auto cleanup = [&] { fs::remove_all(tmp, ec); };

  std::ostringstream out_sink;
  std::ostringstream err_sink;
  CommandStreams io{out_sink, err_sink};

  const fs::path scene_path = tmp / "scene.json";
  {
    std::ofstream scene_file(scene_path, std::ios::binary);
    scene_file << serialize_scene(fixture_scene(1));
    if (!scene_file.good()) {
      cleanup();
      return {false, "cannot write scratch scene"};
    }
  }

  const fs::path map_a = tmp / "map_a.json";
  const fs::path map_b = tmp / "map_b.json";
  if (cmd_build_map(scene_path.string(), "", 7, map_a.string(), io) != 0 ||
      cmd_build_map(scene_path.string(), "", 7, map_b.string(), io) != 0) {
    cleanup();
    return {false, "build-map failed: " + err_sink.str()};
  }
  const auto bytes_a = slurp(map_a);
  const auto bytes_b = slurp(map_b);
  if (!bytes_a || !bytes_b || *bytes_a != *bytes_b) {
    cleanup();
    return {false, "build-map runs differ"};
  }

  const fs::path tasks_a = tmp / "tasks_a";
  const fs::path tasks_b = tmp / "tasks_b";
  if (cmd_gen_tasks(scene_path.string(), map_a.string(), "", 12, 7, tasks_a.string(), io) != 0 ||
      cmd_gen_tasks(scene_path.string(), map_a.string(), "", 12, 7, tasks_b.string(), io) != 0) {
    cleanup();
    return {false, "gen-tasks failed: " + err_sink.str()};
  }
  const auto listing = [](const fs::path& dir) {
    std::vector<fs::path> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) names.push_back(entry.path().filename());
    }
    std::sort(names.begin(), names.end());
    return names;
  };
  const std::vector<fs::path> names_a = listing(tasks_a);
  const std::vector<fs::path> names_b = listing(tasks_b);
  if (names_a != names_b || names_a.empty()) {
    cleanup();
    return {false, "gen-tasks runs produced different file sets"};
  }
  for (const fs::path& name : names_a) {
    const auto file_a = slurp(tasks_a / name);
    const auto file_b = slurp(tasks_b / name);
    if (!file_a || !file_b || *file_a != *file_b) {
      cleanup();
      return {false, "gen-tasks runs differ in " + name.string()};
    }
  }
  cleanup();
  return {true, "build-map and gen-tasks byte-identical across reruns (13 files)"};
}

}  // namespace

bool run_selfcheck(std::ostream& out) {
  struct Item {
    const char* name;
    CheckOutcome (*fn)();
  };
  const Item items[] = {
      {"planner-matches-ucs-oracle", check_planner_oracle},
      {"groundtruth-roundtrip-consistency", check_groundtruth_roundtrip},
      {"metric-formula-exactness", check_metric_exactness},
      {"greedy-matching-optimality", check_matching_oracle},
      {"affinity-clustering-eigensolver", check_spectral},
      {"bearing-codec-inverse", check_bearing_codec},
      {"parser-fuzz-robustness", check_parser_fuzz},
      {"perplexity-filter-oracle", check_perplexity_filter},
      {"stratum-boundaries", check_strata},
      {"command-determinism", check_determinism},
  };
  bool all = true;
  int index = 0;
  for (const Item& item : items) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    CheckOutcome outcome;
    try {
      outcome = item.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("unexpected exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char line[320];
    std::snprintf(line, sizeof(line), "[%s] %2d %-34s %6.2fs  %s\n",
                  outcome.passed ? "PASS" : "FAIL", index, item.name, secs,
                  outcome.detail.c_str());
    out << line;
    all = all && outcome.passed;
  }
  out << (all ? "all 10 criteria passed\n" : "FAILURES present\n");
  return all;
}

}  // namespace cognav
