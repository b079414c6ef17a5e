#include "cognav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "canon_json.hpp"
#include "cognav/errors.hpp"

namespace cognav {

std::vector<MatchedPair> greedy_landmark_matching(const CognitiveMap& pred,
                                                  const CognitiveMap& gt) {
  struct Candidate {
    std::size_t pred_index;
    std::size_t gt_index;
    double iou;
  };
  std::vector<Candidate> candidates;
  for (std::size_t p = 0; p < pred.landmarks.size(); ++p) {
    for (std::size_t g = 0; g < gt.landmarks.size(); ++g) {
      if (pred.landmarks[p].semantic != gt.landmarks[g].semantic) continue;
      const double overlap = iou(pred.landmarks[p].bbox, gt.landmarks[g].bbox);
      if (overlap > 0.0) candidates.push_back({p, g, overlap});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    const std::string& ga = gt.landmarks[a.gt_index].id;
    const std::string& gb = gt.landmarks[b.gt_index].id;
    if (ga != gb) return ga < gb;
    return pred.landmarks[a.pred_index].id < pred.landmarks[b.pred_index].id;
  });

  std::vector<std::uint8_t> pred_used(pred.landmarks.size(), 0);
  std::vector<std::uint8_t> gt_used(gt.landmarks.size(), 0);
  std::vector<MatchedPair> matches;
  for (const Candidate& c : candidates) {
    if (pred_used[c.pred_index] || gt_used[c.gt_index]) continue;
    pred_used[c.pred_index] = 1;
    gt_used[c.gt_index] = 1;
    matches.push_back({c.pred_index, c.gt_index, c.iou});
  }
  return matches;
}

double landmark_miou(const CognitiveMap& pred, const CognitiveMap& gt) {
  if (gt.landmarks.empty()) throw ConfigError("ground truth must have at least one landmark");
  double total = 0.0;
  for (const MatchedPair& m : greedy_landmark_matching(pred, gt)) total += m.iou;
  return total / static_cast<double>(gt.landmarks.size());
}

PrecisionRecall landmark_f1(const CognitiveMap& pred, const CognitiveMap& gt, double iou_thresh) {
  if (gt.landmarks.empty()) throw ConfigError("ground truth must have at least one landmark");
  std::size_t tp = 0;
  for (const MatchedPair& m : greedy_landmark_matching(pred, gt)) {
    if (m.iou >= iou_thresh) ++tp;
  }
  PrecisionRecall out;
  out.precision =
      pred.landmarks.empty() ? 0.0 : static_cast<double>(tp) / pred.landmarks.size();
  out.recall = static_cast<double>(tp) / gt.landmarks.size();
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

double navigation_error(const WorldPoint& p_hat, const WorldPoint& p_star) {
  return ground_distance(p_hat, p_star);
}

double ne_waypoint(const std::vector<Waypoint>& decoded, const WorldPoint& p_star) {
  if (decoded.empty()) throw EmptyDecodedChainError("no decoded waypoints");
  return navigation_error(decoded.back().position, p_star);
}

ExecutionResult execute_plan(const OccupancyGrid& grid, Cell start,
                             const std::vector<Waypoint>& waypoints, double snap_radius) {
  ExecutionResult result;
  if (!grid.navigable(start)) {
    result.final_position = grid.cell_center(start);
    result.failed_leg = 0;
    return result;
  }
  PathPlanner planner(grid);
  Cell current = start;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const auto cell = snap_to_navigable(grid, waypoints[i].position, snap_radius);
    if (!cell) {
      result.final_position = grid.cell_center(current);
      result.failed_leg = i;
      return result;
    }
    const auto leg = planner.shortest_path(current, *cell);
    if (!leg) {
      result.final_position = grid.cell_center(current);
      result.failed_leg = i;
      return result;
    }
    result.traveled_m += leg->length_m;
    current = *cell;
  }
  result.executable = true;
  result.final_position = grid.cell_center(current);
  return result;
}

double spl(bool success, double shortest_m, double traveled_m) {
  if (shortest_m < 0.0 || traveled_m < 0.0) throw ConfigError("lengths must be non-negative");
  if (!success) return 0.0;
  if (traveled_m <= shortest_m) return 1.0;
  return shortest_m / traveled_m;
}

InstanceReport evaluate_instance(const NavTask& task, const ModelOutput& output,
                                 const EvalContext& ctx) {
  const SceneAnnotation& scene = *ctx.scene;
  const CognitiveMap& gt_map = *ctx.gt_map;

  InstanceReport report;
  report.task_id = task.task_id;
  report.stratum = task.stratum;
  report.issues = output.issues.size();

  if (output.map) {
    report.miou = landmark_miou(*output.map, gt_map);
    const PrecisionRecall pr = landmark_f1(*output.map, gt_map, ctx.params.iou_thresh);
    report.precision = pr.precision;
    report.recall = pr.recall;
    report.f1 = pr.f1;
  }

  const WorldPoint p_star = task.gt_chain.goal;
  std::optional<DecodedChain> decoded;
  if (output.chain) {
    const CognitiveMap& decode_map = output.map ? *output.map : gt_map;
    try {
      decoded = decode_chain(decode_map, *output.chain);
    } catch (const EmptyDecodedChainError&) {
      decoded.reset();
    }
  }
  if (!decoded) {
    report.unscored = true;
    return report;
  }
  report.issues += decoded->issues.size();

  report.ne = navigation_error(decoded->p_hat, p_star);
  report.ne_wp = ne_waypoint(decoded->waypoints, p_star);
  report.sr_t = *report.ne < 1.0;

  ExecutionResult exec;
  const auto start =
      snap_to_navigable(scene.grid, task.start_pose.position, ctx.params.snap_radius);
  if (start) {
    exec = execute_plan(scene.grid, *start,
                        decoded->execution_waypoints(ctx.params.agent_height),
                        ctx.params.snap_radius);
  }
  report.sr_p = exec.executable && navigation_error(exec.final_position, p_star) < 1.0;

  std::optional<double> shortest;
  try {
    shortest = geodesic_distance(scene.grid, task.start_pose.position, p_star,
                                 ctx.params.snap_radius);
  } catch (const SnapFailureError&) {
    shortest.reset();
  }
  report.spl = shortest ? spl(report.sr_p, *shortest, exec.traveled_m) : 0.0;
  return report;
}

BenchmarkReport aggregate(const std::vector<InstanceReport>& reports) {
  if (reports.empty()) throw ConfigError("cannot aggregate zero reports");

  BenchmarkReport out;
  struct Accum {
    std::size_t count = 0;
    std::size_t scored = 0;
    double ne = 0.0;
    double ne_wp = 0.0;
    double sr_t = 0.0;
    double sr_p = 0.0;
    double spl = 0.0;
  };
  Accum acc[4];  // overall + one per stratum
  std::size_t unscored = 0;
  double miou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  for (const InstanceReport& r : reports) {
    Accum* targets[2] = {&acc[0], &acc[1 + static_cast<int>(r.stratum)]};
    for (Accum* a : targets) {
      ++a->count;
      if (r.ne) {
        ++a->scored;
        a->ne += *r.ne;
        a->ne_wp += r.ne_wp.value_or(0.0);
      }
      a->sr_t += r.sr_t ? 1.0 : 0.0;
      a->sr_p += r.sr_p ? 1.0 : 0.0;
      a->spl += r.spl;
    }
    unscored += r.unscored ? 1 : 0;
    miou += r.miou;
    precision += r.precision;
    recall += r.recall;
    f1 += r.f1;
  }

  const auto finish = [](const Accum& a) {
    StratumStats s;
    s.count = a.count;
    s.scored = a.scored;
    if (a.count > 0) {
      s.sr_t = a.sr_t / static_cast<double>(a.count);
      s.sr_p = a.sr_p / static_cast<double>(a.count);
      s.spl = a.spl / static_cast<double>(a.count);
    }
    if (a.scored > 0) {
      s.ne_mean = a.ne / static_cast<double>(a.scored);
      s.ne_wp_mean = a.ne_wp / static_cast<double>(a.scored);
    }
    return s;
  };
  out.overall = finish(acc[0]);
  for (int s = 0; s < 3; ++s) out.per_stratum[s] = finish(acc[1 + s]);
  const double n = static_cast<double>(reports.size());
  out.miou = miou / n;
  out.precision = precision / n;
  out.recall = recall / n;
  out.f1 = f1 / n;
  out.unscored_rate = static_cast<double>(unscored) / n;
  return out;
}

namespace {

nlohmann::json stats_to_json(const StratumStats& s) {
  nlohmann::json j = nlohmann::json::object();
  j["count"] = s.count;
  j["scored"] = s.scored;
  j["ne"] = s.ne_mean ? nlohmann::json(*s.ne_mean) : nlohmann::json();
  j["ne_waypoint"] = s.ne_wp_mean ? nlohmann::json(*s.ne_wp_mean) : nlohmann::json();
  j["sr_t"] = s.sr_t;
  j["sr_p"] = s.sr_p;
  j["spl"] = s.spl;
  return j;
}

}  // namespace

std::string serialize_report(std::vector<InstanceReport> instances, const BenchmarkReport& agg) {
  std::sort(instances.begin(), instances.end(),
            [](const InstanceReport& a, const InstanceReport& b) { return a.task_id < b.task_id; });
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json jinstances = nlohmann::json::array();
  for (const InstanceReport& r : instances) {
    nlohmann::json j = nlohmann::json::object();
    j["task_id"] = r.task_id;
    j["stratum"] = to_string(r.stratum);
    j["ne"] = r.ne ? nlohmann::json(*r.ne) : nlohmann::json();
    j["ne_waypoint"] = r.ne_wp ? nlohmann::json(*r.ne_wp) : nlohmann::json();
    j["sr_t"] = r.sr_t;
    j["sr_p"] = r.sr_p;
    j["spl"] = r.spl;
    j["miou"] = r.miou;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["issues"] = r.issues;
    j["unscored"] = r.unscored;
    jinstances.push_back(std::move(j));
  }
  root["instances"] = std::move(jinstances);

  nlohmann::json jagg = nlohmann::json::object();
  jagg["overall"] = stats_to_json(agg.overall);
  jagg["short"] = stats_to_json(agg.stats(Stratum::Short));
  jagg["medium"] = stats_to_json(agg.stats(Stratum::Medium));
  jagg["long"] = stats_to_json(agg.stats(Stratum::Long));
  jagg["miou"] = agg.miou;
  jagg["precision"] = agg.precision;
  jagg["recall"] = agg.recall;
  jagg["f1"] = agg.f1;
  jagg["unscored_rate"] = agg.unscored_rate;
  root["aggregate"] = std::move(jagg);
  return detail::canonical_dump(root);
}

std::string format_report_grid(const BenchmarkReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %8s %8s %8s %8s %8s\n", "", "NE", "SR_t", "SR_p", "SPL",
                "n");
  out += line;
  const auto row = [&](const char* name, const StratumStats& s) {
    char ne_buf[32];
    if (s.ne_mean) {
      std::snprintf(ne_buf, sizeof(ne_buf), "%.2f", *s.ne_mean);
    } else {
      std::snprintf(ne_buf, sizeof(ne_buf), "-");
    }
    std::snprintf(line, sizeof(line), "%-8s %8s %8.1f %8.1f %8.1f %8zu\n", name, ne_buf,
                  100.0 * s.sr_t, 100.0 * s.sr_p, 100.0 * s.spl, s.count);
    out += line;
  };
  row("Overall", report.overall);
  row("Short", report.stats(Stratum::Short));
  row("Medium", report.stats(Stratum::Medium));
  row("Long", report.stats(Stratum::Long));
  std::snprintf(line, sizeof(line), "mIoU %.1f  F1 %.1f  unscored %.1f%%\n", 100.0 * report.miou,
                100.0 * report.f1, 100.0 * report.unscored_rate);
  out += line;
  return out;
}

}  // namespace cognav
