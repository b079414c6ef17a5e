#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cognav/cogmap.hpp"
#include "cognav/planner.hpp"
#include "cognav/scene.hpp"

namespace cognav {

enum class Stratum { Short, Medium, Long };

const char* to_string(Stratum s);
std::optional<Stratum> parse_stratum(std::string_view text);

// Difficulty class from ground-truth path length: Short = [0, 6) m,
// Medium = [6, 10) m, Long = [10, 48] m. Throws OutOfRangeError outside
// [0, 48].
Stratum stratum_of(double length_m);

struct NavQuery {
  std::string s_src;
  Box2D src_bbox;
  std::string s_tgt;
  Box2D tgt_bbox;

  friend bool operator==(const NavQuery&, const NavQuery&) = default;
};

struct PlanStep {
  std::string lm;
  std::string sem;
  // Agent position relative to the landmark (direction from the landmark to
  // the agent).
  RelationDescriptor rel;
  Box2D bbox;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct PlanChain {
  std::vector<PlanStep> steps;
  WorldPoint goal;
  // False for model chains that omit the goal declaration.
  bool has_goal = true;

  friend bool operator==(const PlanChain&, const PlanChain&) = default;
};

struct NavTask {
  std::string task_id;
  std::string scene_id;
  NavQuery query;
  // Cells are present for freshly sampled tasks; tasks loaded from disk
  // carry only the length.
  GridPath gt_path;
  PlanChain gt_chain;
  Stratum stratum = Stratum::Short;
  Pose start_pose;
};

struct ChainConfig {
  double corridor = 1.5;
  double long_seg = 3.0;
  double min_step = 0.5;
  double step = 0.25;
  double agent_height = 0.8;
};

// Landmark-grounded compression of a grid path, walked at the discretization
// step: a step is emitted when the path enters the corridor of a new
// landmark; landmark-free stretches longer than long_seg get one synthetic
// step anchored to the globally nearest landmark; consecutive same-anchor
// steps merge (later wins) and steps closer than min_step to their
// predecessor are dropped (the terminal step always survives). The final
// step anchors to the landmark nearest the path endpoint, and the chain goal
// is the endpoint itself.
PlanChain build_reasoning_chain(const OccupancyGrid& grid, const GridPath& path,
                                const CognitiveMap& map, const ChainConfig& cfg);

struct TaskConfig {
  ChainConfig chain;
  double snap_radius = 0.5;
  int max_tries = 50;
  double max_length = 48.0;
};

// Samples one task: distinct src/tgt entities uniformly over landmarks plus
// attached objects, poses snapped next to their boxes, ground-truth path,
// chain, and stratum. Resamples up to max_tries on unreachable or over-long
// pairs, then throws ExhaustedSamplingError. Deterministic in
// (scene, map, seed, cfg).
NavTask sample_task(const SceneAnnotation& scene, const CognitiveMap& map, std::uint64_t seed,
                    const TaskConfig& cfg);

std::string serialize_chain(const PlanChain& chain);
std::string serialize_task(const NavTask& task);

// Strict task parse; throws SchemaError. The returned task's gt_path holds
// the stored length but no cells.
NavTask parse_task(std::string_view text);

}  // namespace cognav
