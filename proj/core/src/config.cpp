#include "cognav/config.hpp"

#include <cmath>

#include "canon_json.hpp"
#include "cognav/errors.hpp"
#include "json_schema.hpp"

namespace cognav {

namespace {

void require_positive(double value, const char* field) {
  if (!std::isfinite(value) || value <= 0.0) throw ConfigError("must be > 0", field);
}

}  // namespace

void validate(const RunConfig& config) {
  for (std::size_t i = 0; i < config.exclusion.size(); ++i) {
    if (config.exclusion[i].empty()) {
      throw ConfigError("must be non-empty", "exclusion[" + std::to_string(i) + "]");
    }
  }
  if (config.max_landmarks < 1) throw ConfigError("must be >= 1", "max_landmarks");
  require_positive(config.r0, "r0");
  if (!std::isfinite(config.growth) || config.growth <= 1.0) {
    throw ConfigError("must be > 1", "growth");
  }
  if (!std::isfinite(config.eps_on) || config.eps_on < 0.0) {
    throw ConfigError("must be >= 0", "eps_on");
  }
  if (config.k < 0) throw ConfigError("must be >= 0 (0 = automatic)", "k");
  require_positive(config.resolution, "resolution");
  require_positive(config.step, "step");
  require_positive(config.corridor, "corridor");
  require_positive(config.long_seg, "long_seg");
  if (!std::isfinite(config.min_step) || config.min_step < 0.0) {
    throw ConfigError("must be >= 0", "min_step");
  }
  require_positive(config.agent_height, "agent_height");
  require_positive(config.snap_radius, "snap_radius");
  if (config.max_tries < 1) throw ConfigError("must be >= 1", "max_tries");
  require_positive(config.max_length, "max_length");
  if (!std::isfinite(config.iou_thresh) || config.iou_thresh <= 0.0 ||
      config.iou_thresh > 1.0) {
    throw ConfigError("must be in (0, 1]", "iou_thresh");
  }
  if (config.band) validate(*config.band);
}

RunConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what(), "<config>");
  }
  detail::require_object(doc, "<config>");
  detail::reject_unknown_keys(
      doc,
      {"exclusion", "max_landmarks", "r0", "growth", "eps_on", "k", "resolution", "step",
       "corridor", "long_seg", "min_step", "agent_height", "snap_radius", "max_tries",
       "max_length", "iou_thresh", "band"},
      "<config>");

  RunConfig config;
  if (doc.contains("exclusion")) {
    const nlohmann::json& jex = doc["exclusion"];
    detail::require_array(jex, "exclusion");
    config.exclusion.clear();
    for (std::size_t i = 0; i < jex.size(); ++i) {
      const std::string path = "exclusion[" + std::to_string(i) + "]";
      if (!jex[i].is_string()) throw SchemaError("expected a string", path);
      config.exclusion.push_back(jex[i].get<std::string>());
    }
  }
  const auto take_int = [&](const char* key, int& out) {
    if (!doc.contains(key)) return;
    const std::int64_t v = detail::as_integer(doc[key], key);
    out = static_cast<int>(v);
  };
  const auto take_double = [&](const char* key, double& out) {
    if (!doc.contains(key)) return;
    out = detail::as_finite_number(doc[key], key);
  };
  take_int("max_landmarks", config.max_landmarks);
  take_double("r0", config.r0);
  take_double("growth", config.growth);
  take_double("eps_on", config.eps_on);
  take_int("k", config.k);
  take_double("resolution", config.resolution);
  take_double("step", config.step);
  take_double("corridor", config.corridor);
  take_double("long_seg", config.long_seg);
  take_double("min_step", config.min_step);
  take_double("agent_height", config.agent_height);
  take_double("snap_radius", config.snap_radius);
  take_int("max_tries", config.max_tries);
  take_double("max_length", config.max_length);
  take_double("iou_thresh", config.iou_thresh);
  if (doc.contains("band")) {
    const nlohmann::json& jband = doc["band"];
    detail::require_object(jband, "band");
    detail::reject_unknown_keys(jband, {"tau_min", "tau_max"}, "band");
    PerplexityBand band;
    band.tau_min = detail::require_number(jband, "tau_min", "band");
    band.tau_max = detail::require_number(jband, "tau_max", "band");
    config.band = band;
  }
  validate(config);
  return config;
}

std::string serialize_config(const RunConfig& config) {
  nlohmann::json doc = nlohmann::json::object();
  doc["exclusion"] = config.exclusion;
  doc["max_landmarks"] = config.max_landmarks;
  doc["r0"] = config.r0;
  doc["growth"] = config.growth;
  doc["eps_on"] = config.eps_on;
  doc["k"] = config.k;
  doc["resolution"] = config.resolution;
  doc["step"] = config.step;
  doc["corridor"] = config.corridor;
  doc["long_seg"] = config.long_seg;
  doc["min_step"] = config.min_step;
  doc["agent_height"] = config.agent_height;
  doc["snap_radius"] = config.snap_radius;
  doc["max_tries"] = config.max_tries;
  doc["max_length"] = config.max_length;
  doc["iou_thresh"] = config.iou_thresh;
  if (config.band) {
    nlohmann::json jband = nlohmann::json::object();
    jband["tau_min"] = config.band->tau_min;
    jband["tau_max"] = config.band->tau_max;
    doc["band"] = std::move(jband);
  }
  return detail::canonical_dump(doc);
}

MapConfig to_map_config(const RunConfig& config) {
  MapConfig out;
  out.exclusion_list = config.exclusion;
  out.max_landmarks = config.max_landmarks;
  out.r0 = config.r0;
  out.growth = config.growth;
  out.eps_on = config.eps_on;
  out.k = config.k;
  return out;
}

ChainConfig to_chain_config(const RunConfig& config) {
  ChainConfig out;
  out.corridor = config.corridor;
  out.long_seg = config.long_seg;
  out.min_step = config.min_step;
  out.step = config.step;
  out.agent_height = config.agent_height;
  return out;
}

TaskConfig to_task_config(const RunConfig& config) {
  TaskConfig out;
  out.chain = to_chain_config(config);
  out.snap_radius = config.snap_radius;
  out.max_tries = config.max_tries;
  out.max_length = config.max_length;
  return out;
}

EvalParams to_eval_params(const RunConfig& config) {
  EvalParams out;
  out.snap_radius = config.snap_radius;
  out.iou_thresh = config.iou_thresh;
  out.agent_height = config.agent_height;
  return out;
}

}  // namespace cognav
