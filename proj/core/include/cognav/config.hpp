#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cognav/cogmap.hpp"
#include "cognav/cogrs.hpp"
#include "cognav/metrics.hpp"
#include "cognav/tasks.hpp"

namespace cognav {

// Every tunable of the pipeline in one document. Defaults match the
// per-module defaults; load_config validates each field and rejects
// unknown keys.
struct RunConfig {
  // Landmark selection and object attachment.
  std::vector<std::string> exclusion = {"floor", "carpet",     "rug",
                                        "ceiling", "wall", "door frame"};
  int max_landmarks = 20;   // > 0
  double r0 = 2.0;          // initial attachment radius, m, > 0
  double growth = 1.5;      // radius growth factor, > 1
  double eps_on = 0.05;     // vertical-contact tolerance, m, >= 0
  int k = 0;                // region count; 0 selects the eigengap heuristic

  // Grid synthesis and plan discretization.
  double resolution = 0.1;  // grid cell size, m, > 0
  double step = 0.25;       // path discretization step, m, > 0

  // Reasoning chain construction.
  double corridor = 1.5;    // landmark corridor radius, m, > 0
  double long_seg = 3.0;    // minimum landmark-free run for a cue, m, > 0
  double min_step = 0.5;    // minimum arc gap between steps, m, >= 0
  double agent_height = 0.8;  // waypoint height, m, > 0

  // Task sampling.
  double snap_radius = 0.5;  // navigable snap search radius, m, > 0
  int max_tries = 50;        // sampling attempts, > 0
  double max_length = 48.0;  // longest admissible path, m, > 0

  // Evaluation.
  double iou_thresh = 0.25;  // detection threshold, in (0, 1]

  // Perplexity filtering; absent selects the percentile auto band.
  std::optional<PerplexityBand> band;
};

// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

// Parses a JSON document; unknown keys rejected, every field validated.
RunConfig parse_config(const std::string& text);

std::string serialize_config(const RunConfig& config);

MapConfig to_map_config(const RunConfig& config);
ChainConfig to_chain_config(const RunConfig& config);
TaskConfig to_task_config(const RunConfig& config);
EvalParams to_eval_params(const RunConfig& config);

}  // namespace cognav
