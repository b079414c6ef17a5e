#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "cognav/cogrs.hpp"

namespace cognav {

// Output streams for command summaries (out) and diagnostics (err).
struct CommandStreams {
  std::ostream& out;
  std::ostream& err;
};

// All commands: 0 = success, 1 = validation error, 2 = I/O error. Diagnostics
// go to io.err; nothing is written outside the named output paths.

// Builds the cognitive map for a scene and writes it to out_path; prints
// landmark/region/attachment counts. config_path may be empty for defaults.
int cmd_build_map(const std::string& scene_path, const std::string& config_path,
                  std::uint64_t seed, const std::string& out_path, CommandStreams io);

// Samples n tasks against a scene and its map, writing one JSON file per
// task plus manifest.json (stratum counts and task ids) into out_dir. Task i
// uses seed + i.
int cmd_gen_tasks(const std::string& scene_path, const std::string& map_path,
                  const std::string& config_path, int n, std::uint64_t seed,
                  const std::string& out_dir, CommandStreams io);

// Scores model outputs (JSON-lines of {"task_id", "model_text"}) against the
// tasks in tasks_dir, writes the report JSON to report_path, and prints the
// summary grid. Tasks without an output line score as unscored failures;
// malformed or unknown-id lines are reported and skipped.
int cmd_eval(const std::string& tasks_dir, const std::string& outputs_path,
             const std::string& scene_path, const std::string& config_path, bool strict_parse,
             const std::string& report_path, CommandStreams io);

// Filters scored records (JSON-lines) by a perplexity band; absent band
// selects the percentile default from the corpus. Writes the summary JSON to
// out_path and the kept ids (one per line) to out_path + ".ids". Malformed
// lines are reported and skipped.
int cmd_cogrs(const std::string& records_path, const std::optional<PerplexityBand>& band,
              const std::string& out_path, CommandStreams io);

}  // namespace cognav
