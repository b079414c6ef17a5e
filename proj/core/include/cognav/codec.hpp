#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cognav/cogmap.hpp"
#include "cognav/planner.hpp"
#include "cognav/tasks.hpp"

namespace cognav {

struct ParseIssue {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Error;
  std::string path;
  std::string message;
};

struct ModelOutput {
  // Present only when the corresponding structure validated without errors.
  std::optional<CognitiveMap> map;
  std::optional<PlanChain> chain;
  std::vector<ParseIssue> issues;
  // First 256 characters of the input, retained for reports.
  std::string raw_excerpt;

  bool has_errors() const;
};

// Extracts a cognitive map and/or plan chain from arbitrary model text.
// Never throws. The first balanced JSON object is taken from a fenced block
// if one exists, else from the raw text. Accepts either the canonical
// {"map": ..., "chain": ...} wrapper or the map/chain fields inline at the
// top level. Semantic labels are lowercased and whitespace-collapsed. An
// error inside a structure withholds that whole structure; the other is
// still returned when it validates on its own.
//
// strict mode: the entire text must be one JSON document (no extraction from
// prose) and warnings are promoted to errors.
ModelOutput parse_model_output(std::string_view text, bool strict = false);

// Waypoint = landmark bbox center + dist * u(dir). The step's landmark
// reference resolves by exact id first, then by unique semantic. Throws
// UnknownLandmarkError / AmbiguousSemanticError.
Waypoint decode_step(const CognitiveMap& map, const PlanStep& step);

struct DecodedChain {
  // Per-step decoded waypoints, skipping unresolvable steps.
  std::vector<Waypoint> waypoints;
  // Declared goal if present, else the last decoded waypoint.
  WorldPoint p_hat;
  std::vector<ParseIssue> issues;

  // Waypoints to hand to plan execution: the declared goal replaces the last
  // decoded waypoint as the chain's terminal position.
  std::vector<Waypoint> execution_waypoints(double agent_height = 0.8) const;

 private:
  friend DecodedChain decode_chain(const CognitiveMap&, const PlanChain&);
  bool has_goal_ = false;
};

// Decodes every step in order. Unresolvable steps are skipped with a
// recorded issue; a chain where every step fails throws
// EmptyDecodedChainError.
DecodedChain decode_chain(const CognitiveMap& map, const PlanChain& chain);

// Issue report as a JSON document {"map_present", "chain_present",
// "issues": [{severity, path, message}], "raw_excerpt"}.
std::string serialize_model_output(const ModelOutput& out);

// Canonical {"map": ..., "chain": ...} document, the reference form a model
// reply is compared against; parse_model_output on it yields both structures
// with zero issues.
std::string serialize_reference_output(const CognitiveMap& map, const PlanChain& chain);

}  // namespace cognav
