#include "cognav/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include "canon_json.hpp"
#include "cognav/errors.hpp"
#include "cognav/rng.hpp"
#include "doc_readers.hpp"
#include "json_schema.hpp"

namespace cognav {

const char* to_string(Stratum s) {
  switch (s) {
    case Stratum::Short: return "short";
    case Stratum::Medium: return "medium";
    case Stratum::Long: return "long";
  }
  return "short";
}

std::optional<Stratum> parse_stratum(std::string_view text) {
  if (text == "short") return Stratum::Short;
  if (text == "medium") return Stratum::Medium;
  if (text == "long") return Stratum::Long;
  return std::nullopt;
}

Stratum stratum_of(double length_m) {
  if (!(length_m >= 0.0)) throw OutOfRangeError("path length must be non-negative");
  if (length_m < 6.0) return Stratum::Short;
  if (length_m < 10.0) return Stratum::Medium;
  if (length_m <= 48.0) return Stratum::Long;
  throw OutOfRangeError("path length exceeds the 48 m stratum ceiling");
}

namespace {

const Landmark* nearest_landmark(const CognitiveMap& map, const WorldPoint& p, double max_dist) {
  const Landmark* best = nullptr;
  double best_d = 0.0;
  for (const auto& lm : map.landmarks) {
    const double d = ground_distance(p, lm.bbox.center());
    if (d > max_dist) continue;
    if (!best || d < best_d || (d == best_d && lm.id < best->id)) {
      best = &lm;
      best_d = d;
    }
  }
  return best;
}

PlanStep step_at(const Landmark& lm, const WorldPoint& agent) {
  PlanStep step;
  step.lm = lm.id;
  step.sem = lm.semantic;
  step.bbox = lm.bbox;
  const WorldPoint lc = lm.bbox.center();
  step.rel.dist = ground_distance(lc, agent);
  const double dx = agent.x - lc.x;
  const double dz = agent.z - lc.z;
  step.rel.dir = (dx == 0.0 && dz == 0.0) ? DirBin::N : bearing_bin(dx, dz);
  step.rel.h = VerticalRel::Same;
  return step;
}

}  // namespace

PlanChain build_reasoning_chain(const OccupancyGrid& grid, const GridPath& path,
                                const CognitiveMap& map, const ChainConfig& cfg) {
  if (path.cells.empty()) throw ConfigError("cannot build a chain from an empty path");
  if (map.landmarks.empty()) {
    throw EmptySelectionError("cannot build a chain without landmarks");
  }
  const std::vector<Waypoint> wps = discretize(grid, path, cfg.step, cfg.agent_height);
  // Arc position of each sample; the last one sits at the full path length.
  std::vector<double> arc(wps.size());
  for (std::size_t i = 0; i + 1 < wps.size(); ++i) arc[i] = static_cast<double>(i) * cfg.step;
  arc.back() = path.length_m;

  struct Emission {
    std::size_t wp;
    const Landmark* anchor;
  };
  std::vector<Emission> emissions;

  // Corridor hits: a step whenever the walk enters the corridor of a
  // landmark other than the previous step's anchor.
  const Landmark* current = nullptr;
  std::vector<const Landmark*> in_corridor(wps.size(), nullptr);
  for (std::size_t i = 0; i < wps.size(); ++i) {
    in_corridor[i] = nearest_landmark(map, wps[i].position, cfg.corridor);
    if (in_corridor[i] && in_corridor[i] != current) {
      emissions.push_back({i, in_corridor[i]});
      current = in_corridor[i];
    }
  }

  // One synthetic cue per corridor-free stretch longer than long_seg,
  // anchored to the overall nearest landmark of the stretch midpoint.
  std::vector<Emission> synthetic;
  std::size_t run_start = 0;
  bool in_run = false;
  const auto close_run = [&](std::size_t end) {
    if (!in_run) return;
    in_run = false;
    if (arc[end - 1] - arc[run_start] > cfg.long_seg) {
      const std::size_t mid = run_start + (end - 1 - run_start) / 2;
      const Landmark* anchor =
          nearest_landmark(map, wps[mid].position, std::numeric_limits<double>::infinity());
      synthetic.push_back({mid, anchor});
    }
  };
  for (std::size_t i = 0; i < wps.size(); ++i) {
    if (!in_corridor[i]) {
      if (!in_run) {
        in_run = true;
        run_start = i;
      }
    } else {
      close_run(i);
    }
  }
  close_run(wps.size());

  std::vector<Emission> merged_stream;
  merged_stream.reserve(emissions.size() + synthetic.size());
  std::merge(emissions.begin(), emissions.end(), synthetic.begin(), synthetic.end(),
             std::back_inserter(merged_stream),
             [](const Emission& a, const Emission& b) { return a.wp < b.wp; });

  // Merge consecutive same-anchor emissions, keeping the later one.
  std::vector<Emission> compact;
  for (const Emission& e : merged_stream) {
    if (!compact.empty() && compact.back().anchor == e.anchor) {
      compact.back() = e;
    } else {
      compact.push_back(e);
    }
  }
  // Drop emissions closer than min_step to their predecessor.
  std::vector<Emission> spaced;
  for (const Emission& e : compact) {
    if (!spaced.empty() &&
        ground_distance(wps[spaced.back().wp].position, wps[e.wp].position) < cfg.min_step) {
      continue;
    }
    spaced.push_back(e);
  }

  // Terminal step at the path endpoint; earlier steps that would collide
  // with it (same anchor or too close) give way, never the terminal itself.
  const WorldPoint endpoint = wps.back().position;
  const Landmark* terminal_anchor =
      nearest_landmark(map, endpoint, std::numeric_limits<double>::infinity());
  while (!spaced.empty() &&
         (spaced.back().anchor == terminal_anchor ||
          ground_distance(wps[spaced.back().wp].position, endpoint) < cfg.min_step)) {
    spaced.pop_back();
  }

  PlanChain chain;
  for (const Emission& e : spaced) chain.steps.push_back(step_at(*e.anchor, wps[e.wp].position));
  chain.steps.push_back(step_at(*terminal_anchor, endpoint));
  chain.goal = {endpoint.x, 0.0, endpoint.z};
  chain.has_goal = true;
  return chain;
}

namespace {

struct Entity {
  std::string desc;
  Box2D bbox;
};

std::vector<Entity> entity_pool(const SceneAnnotation& scene, const CognitiveMap& map) {
  std::vector<Entity> pool;
  for (const auto& lm : map.landmarks) {
    pool.push_back({lm.semantic + " #" + lm.id, lm.bbox});
  }
  for (const auto& att : map.attachments) {
    const ObjectInstance* obj = scene.find_object(att.object_id);
    if (obj) pool.push_back({att.semantic + " #" + att.object_id, obj->box.footprint()});
  }
  return pool;
}

// A pose next to the box: side-edge midpoints nudged outward (N, E, S, W
// order), the box center as a last resort, each snapped to the grid.
std::optional<Cell> snap_adjacent(const OccupancyGrid& grid, const Box2D& box, double radius) {
  const double off = grid.resolution();
  const double cx = box.center_x();
  const double cz = box.center_z();
  const WorldPoint candidates[5] = {{cx, 0.0, box.z_max + off},
                                    {box.x_max + off, 0.0, cz},
                                    {cx, 0.0, box.z_min - off},
                                    {box.x_min - off, 0.0, cz},
                                    {cx, 0.0, cz}};
  for (const WorldPoint& p : candidates) {
    if (auto cell = snap_to_navigable(grid, p, radius)) return cell;
  }
  return std::nullopt;
}

}  // namespace

NavTask sample_task(const SceneAnnotation& scene, const CognitiveMap& map, std::uint64_t seed,
                    const TaskConfig& cfg) {
  const std::vector<Entity> pool = entity_pool(scene, map);
  if (pool.size() < 2) {
    throw ExhaustedSamplingError("scene offers fewer than 2 navigable entities");
  }

  Rng rng(seed);
  PathPlanner planner(scene.grid);
  for (int attempt = 0; attempt < cfg.max_tries; ++attempt) {
    const std::size_t i = rng.index(pool.size());
    std::size_t j = rng.index(pool.size() - 1);
    if (j >= i) ++j;
    const Entity& src = pool[i];
    const Entity& tgt = pool[j];

    const auto start = snap_adjacent(scene.grid, src.bbox, cfg.snap_radius);
    const auto goal = snap_adjacent(scene.grid, tgt.bbox, cfg.snap_radius);
    if (!start || !goal) continue;
    auto path = planner.shortest_path(*start, *goal);
    if (!path || path->length_m > cfg.max_length) continue;

    NavTask task;
    task.task_id = scene.scene_id + "_s" + std::to_string(seed);
    task.scene_id = scene.scene_id;
    task.query = {src.desc, src.bbox, tgt.desc, tgt.bbox};
    task.stratum = stratum_of(path->length_m);
    task.gt_chain = build_reasoning_chain(scene.grid, *path, map, cfg.chain);

    WorldPoint start_pos = scene.grid.cell_center(path->cells.front());
    start_pos.y = cfg.chain.agent_height;
    double yaw = 0.0;
    if (path->cells.size() > 1) {
      const Cell a = path->cells[0];
      const Cell b = path->cells[1];
      yaw = normalize_deg(azimuth_deg((b.col - a.col) * scene.grid.resolution(),
                                      (b.row - a.row) * scene.grid.resolution()));
    }
    task.start_pose = {start_pos, yaw};
    task.gt_path = std::move(*path);
    return task;
  }
  throw ExhaustedSamplingError("no reachable entity pair within " +
                               std::to_string(cfg.max_tries) + " tries");
}

std::string serialize_chain(const PlanChain& chain) {
  return detail::canonical_dump(detail::chain_to_json(chain));
}

std::string serialize_task(const NavTask& task) {
  nlohmann::json root = nlohmann::json::object();
  root["task_id"] = task.task_id;
  root["scene_id"] = task.scene_id;
  const auto entity = [](const std::string& desc, const Box2D& box) {
    return nlohmann::json{{"desc", desc},
                          {"bbox", {box.x_min, box.x_max, box.z_min, box.z_max}}};
  };
  root["query"] = {{"src", entity(task.query.s_src, task.query.src_bbox)},
                   {"tgt", entity(task.query.s_tgt, task.query.tgt_bbox)}};
  root["stratum"] = to_string(task.stratum);
  root["gt_path_length_m"] = task.gt_path.length_m;
  root["gt_chain"] = detail::chain_to_json(task.gt_chain);
  root["start_pose"] = {{"x", task.start_pose.position.x},
                        {"y", task.start_pose.position.y},
                        {"z", task.start_pose.position.z},
                        {"yaw", task.start_pose.yaw_deg}};
  return detail::canonical_dump(root);
}

namespace {

Box2D parse_box2_strict(const nlohmann::json& v, const std::string& path) {
  detail::require_array(v, path);
  if (v.size() != 4) throw SchemaError("expected [x_min, x_max, z_min, z_max]", path);
  double vals[4];
  for (std::size_t i = 0; i < 4; ++i) {
    vals[i] = detail::as_finite_number(v[i], detail::at_index(path, i));
  }
  if (vals[0] > vals[1] || vals[2] > vals[3]) throw SchemaError("inverted box", path);
  return {vals[0], vals[1], vals[2], vals[3]};
}

}  // namespace

NavTask parse_task(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  detail::require_object(root, "");
  detail::reject_unknown_keys(
      root, {"task_id", "scene_id", "query", "stratum", "gt_path_length_m", "gt_chain",
             "start_pose"},
      "");

  NavTask task;
  task.task_id = detail::require_string(root, "task_id", "");
  task.scene_id = detail::require_string(root, "scene_id", "");

  const nlohmann::json& jquery = detail::require_field(root, "query", "");
  detail::require_object(jquery, "query");
  detail::reject_unknown_keys(jquery, {"src", "tgt"}, "query");
  const auto read_entity = [&](const char* key, std::string& desc, Box2D& box) {
    const nlohmann::json& v = detail::require_field(jquery, key, "query");
    const std::string path = detail::join("query", key);
    detail::require_object(v, path);
    detail::reject_unknown_keys(v, {"desc", "bbox"}, path);
    desc = detail::require_string(v, "desc", path);
    box = parse_box2_strict(detail::require_field(v, "bbox", path), detail::join(path, "bbox"));
  };
  read_entity("src", task.query.s_src, task.query.src_bbox);
  read_entity("tgt", task.query.s_tgt, task.query.tgt_bbox);

  const std::string stratum_text = detail::require_string(root, "stratum", "");
  const auto stratum = parse_stratum(stratum_text);
  if (!stratum) throw SchemaError("unknown stratum '" + stratum_text + "'", "stratum");
  task.stratum = *stratum;

  task.gt_path.length_m = detail::require_number(root, "gt_path_length_m", "");
  if (task.gt_path.length_m < 0.0) {
    throw SchemaError("must be non-negative", "gt_path_length_m");
  }
  if (stratum_of(task.gt_path.length_m) != task.stratum) {
    throw SchemaError("stratum does not match gt_path_length_m", "stratum");
  }

  std::vector<ParseIssue> issues;
  auto chain = detail::read_chain(detail::require_field(root, "gt_chain", ""), "gt_chain", issues);
  for (const auto& issue : issues) {
    if (issue.severity == ParseIssue::Severity::Error) {
      throw SchemaError(issue.message, issue.path);
    }
  }
  if (!chain) throw SchemaError("chain did not validate", "gt_chain");
  if (!chain->has_goal) throw SchemaError("missing field", "gt_chain.goal");
  task.gt_chain = std::move(*chain);

  const nlohmann::json& jpose = detail::require_field(root, "start_pose", "");
  detail::require_object(jpose, "start_pose");
  detail::reject_unknown_keys(jpose, {"x", "y", "z", "yaw"}, "start_pose");
  task.start_pose.position = {detail::require_number(jpose, "x", "start_pose"),
                              detail::require_number(jpose, "y", "start_pose"),
                              detail::require_number(jpose, "z", "start_pose")};
  task.start_pose.yaw_deg = normalize_deg(detail::require_number(jpose, "yaw", "start_pose"));
  return task;
}

}  // namespace cognav
