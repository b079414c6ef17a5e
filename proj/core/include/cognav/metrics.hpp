#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cognav/codec.hpp"
#include "cognav/cogmap.hpp"
#include "cognav/planner.hpp"
#include "cognav/scene.hpp"
#include "cognav/tasks.hpp"

namespace cognav {

struct MatchedPair {
  std::size_t pred_index = 0;
  std::size_t gt_index = 0;
  double iou = 0.0;
};

// Greedy one-to-one matching: candidates are same-semantic pairs with
// IoU > 0, taken by descending IoU (ties by gt id, then pred id).
std::vector<MatchedPair> greedy_landmark_matching(const CognitiveMap& pred,
                                                  const CognitiveMap& gt);

// Mean matched IoU over ground-truth landmarks; unmatched ones contribute 0.
double landmark_miou(const CognitiveMap& pred, const CognitiveMap& gt);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// A predicted landmark is a true positive when its greedy match reaches
// iou_thresh.
PrecisionRecall landmark_f1(const CognitiveMap& pred, const CognitiveMap& gt, double iou_thresh);

// Ground-plane Euclidean distance between predicted and true target.
double navigation_error(const WorldPoint& p_hat, const WorldPoint& p_star);

// Distance from the last decoded waypoint to the target; deliberately
// ignores any declared goal. Throws EmptyDecodedChainError on an empty list.
double ne_waypoint(const std::vector<Waypoint>& decoded, const WorldPoint& p_star);

struct ExecutionResult {
  bool executable = false;
  double traveled_m = 0.0;
  WorldPoint final_position;
  // Index of the waypoint whose snap or leg failed.
  std::optional<std::size_t> failed_leg;
};

// Walks start -> w1 -> ... -> wn leg by leg, snapping each waypoint to the
// grid. Executable iff every snap and leg succeeds; traveled sums the leg
// path lengths; final_position is the last reached cell center.
ExecutionResult execute_plan(const OccupancyGrid& grid, Cell start,
                             const std::vector<Waypoint>& waypoints, double snap_radius = 0.5);

// success * shortest / max(shortest, traveled); 0 when unsuccessful, 1 when
// successful without detour (covers shortest = traveled = 0).
double spl(bool success, double shortest_m, double traveled_m);

struct InstanceReport {
  std::string task_id;
  Stratum stratum = Stratum::Short;
  // Absent when the output yielded no decodable chain (the instance is
  // unscored for the error means but still counts as a failure).
  std::optional<double> ne;
  std::optional<double> ne_wp;
  bool sr_t = false;
  bool sr_p = false;
  double spl = 0.0;
  double miou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t issues = 0;
  bool unscored = false;
};

struct EvalParams {
  double snap_radius = 0.5;
  double iou_thresh = 0.25;
  double agent_height = 0.8;
};

struct EvalContext {
  const SceneAnnotation* scene = nullptr;
  const CognitiveMap* gt_map = nullptr;
  EvalParams params;
};

// Scores one model output against one task: map metrics against the ground
// truth map, chain decode (against the predicted map when present, else the
// ground-truth map), NE from the declared goal, NE_waypoint from the decoded
// terminal, execution from the task's start pose, SPL against the geodesic
// shortest path.
InstanceReport evaluate_instance(const NavTask& task, const ModelOutput& output,
                                 const EvalContext& ctx);

struct StratumStats {
  std::size_t count = 0;
  // Instances contributing to the error means.
  std::size_t scored = 0;
  std::optional<double> ne_mean;
  std::optional<double> ne_wp_mean;
  double sr_t = 0.0;
  double sr_p = 0.0;
  double spl = 0.0;
};

struct BenchmarkReport {
  StratumStats overall;
  StratumStats per_stratum[3];
  double miou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double unscored_rate = 0.0;

  const StratumStats& stats(Stratum s) const { return per_stratum[static_cast<int>(s)]; }
};

// Arithmetic means per stratum and overall; NE means skip unscored
// instances, success rates and SPL never do.
BenchmarkReport aggregate(const std::vector<InstanceReport>& reports);

// {"instances": [...], "aggregate": {...}} with instances sorted by task_id.
std::string serialize_report(std::vector<InstanceReport> instances, const BenchmarkReport& agg);

// Fixed-width console grid in the style of the headline results table:
// NE with 2 decimals, SR/SPL as percentages with 1 decimal.
std::string format_report_grid(const BenchmarkReport& report);

}  // namespace cognav
