#include "cognav/codec.hpp"

#include <algorithm>
#include <cctype>

#include "canon_json.hpp"
#include "cognav/errors.hpp"
#include "doc_readers.hpp"

namespace cognav {

using nlohmann::json;

bool ModelOutput::has_errors() const {
  return std::any_of(issues.begin(), issues.end(), [](const ParseIssue& issue) {
    return issue.severity == ParseIssue::Severity::Error;
  });
}

namespace {

std::string sanitized_excerpt(std::string_view text) {
  std::string out;
  const std::size_t n = std::min<std::size_t>(text.size(), 256);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char ch = static_cast<unsigned char>(text[i]);
    out += (ch >= 0x20 && ch < 0x7f) ? static_cast<char>(ch) : '?';
  }
  return out;
}

// Longest balanced {...} span starting at `start`, honoring strings and
// escapes. npos when unbalanced.
std::size_t balanced_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (ch == '\\') {
        escaped = true;
      } else if (ch == '"') {
        in_string = false;
      }
      continue;
    }
    if (ch == '"') {
      in_string = true;
    } else if (ch == '{') {
      ++depth;
    } else if (ch == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<json> first_json_object(std::string_view text) {
  int attempts = 0;
  for (std::size_t pos = text.find('{'); pos != std::string_view::npos && attempts < 64;
       pos = text.find('{', pos + 1), ++attempts) {
    const std::size_t end = balanced_end(text, pos);
    if (end == std::string_view::npos) continue;
    json parsed = json::parse(text.substr(pos, end - pos), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
  }
  return std::nullopt;
}

// The first fenced code block's contents, if any fence exists.
std::optional<std::string_view> fenced_block(std::string_view text) {
  const std::size_t open = text.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  std::size_t content = text.find('\n', open + 3);
  if (content == std::string_view::npos) return std::nullopt;
  ++content;
  const std::size_t close = text.find("```", content);
  if (close == std::string_view::npos) return text.substr(content);
  return text.substr(content, close - content);
}

}  // namespace

ModelOutput parse_model_output(std::string_view text, bool strict) {
  ModelOutput out;
  out.raw_excerpt = sanitized_excerpt(text);

  std::optional<json> doc;
  if (strict) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      out.issues.push_back(
          {ParseIssue::Severity::Error, "", "strict mode requires one JSON object document"});
      return out;
    }
    doc = std::move(parsed);
  } else {
    if (const auto block = fenced_block(text)) doc = first_json_object(*block);
    if (!doc) doc = first_json_object(text);
    if (!doc) {
      out.issues.push_back({ParseIssue::Severity::Error, "", "no JSON object found in text"});
      return out;
    }
  }

  const json& root = *doc;
  const bool wrapped = root.contains("map") || root.contains("chain");
  if (wrapped) {
    for (auto it = root.begin(); it != root.end(); ++it) {
      if (it.key() != "map" && it.key() != "chain") {
        out.issues.push_back({ParseIssue::Severity::Warning, it.key(), "unknown field"});
      }
    }
    if (root.contains("map")) out.map = detail::read_map(root["map"], "map", out.issues);
    if (root.contains("chain")) out.chain = detail::read_chain(root["chain"], "chain", out.issues);
  } else {
    json map_part = json::object();
    json chain_part = json::object();
    for (auto it = root.begin(); it != root.end(); ++it) {
      if (it.key() == "regions" || it.key() == "landmarks" || it.key() == "objects") {
        map_part[it.key()] = it.value();
      } else if (it.key() == "steps" || it.key() == "goal") {
        chain_part[it.key()] = it.value();
      } else {
        out.issues.push_back({ParseIssue::Severity::Warning, it.key(), "unknown field"});
      }
    }
    if (!map_part.empty()) out.map = detail::read_map(map_part, "", out.issues);
    if (!chain_part.empty()) out.chain = detail::read_chain(chain_part, "", out.issues);
    if (map_part.empty() && chain_part.empty()) {
      out.issues.push_back(
          {ParseIssue::Severity::Error, "", "document has neither map nor chain fields"});
    }
  }

  if (strict) {
    for (auto& issue : out.issues) issue.severity = ParseIssue::Severity::Error;
    if (out.has_errors()) {
      out.map.reset();
      out.chain.reset();
    }
  }
  return out;
}

namespace {

const Landmark* resolve_semantic(const CognitiveMap& map, const std::string& key) {
  const std::string norm = detail::normalize_semantic(key);
  const Landmark* found = nullptr;
  for (const auto& lm : map.landmarks) {
    if (lm.semantic != norm) continue;
    if (found) {
      throw AmbiguousSemanticError("semantic '" + norm + "' matches several landmarks", norm);
    }
    found = &lm;
  }
  return found;
}

const Landmark* resolve_landmark(const CognitiveMap& map, const PlanStep& step) {
  if (!step.lm.empty()) {
    if (const Landmark* lm = map.find_landmark(step.lm)) return lm;
  }
  if (!step.sem.empty()) {
    if (const Landmark* lm = resolve_semantic(map, step.sem)) return lm;
  }
  if (!step.lm.empty()) {
    if (const Landmark* lm = resolve_semantic(map, step.lm)) return lm;
  }
  throw UnknownLandmarkError("step references no landmark in the map",
                             step.lm.empty() ? step.sem : step.lm);
}

}  // namespace

Waypoint decode_step(const CognitiveMap& map, const PlanStep& step) {
  const Landmark* lm = resolve_landmark(map, step);
  double ux = 0.0;
  double uz = 0.0;
  bin_unit(step.rel.dir, ux, uz);
  const WorldPoint c = lm->bbox.center();
  return {{c.x + step.rel.dist * ux, 0.0, c.z + step.rel.dist * uz}};
}

DecodedChain decode_chain(const CognitiveMap& map, const PlanChain& chain) {
  DecodedChain out;
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    try {
      out.waypoints.push_back(decode_step(map, chain.steps[i]));
    } catch (const Error& e) {
      out.issues.push_back({ParseIssue::Severity::Warning,
                            "steps[" + std::to_string(i) + "]", e.what()});
    }
  }
  if (out.waypoints.empty()) {
    throw EmptyDecodedChainError("no step of the chain could be decoded");
  }
  out.has_goal_ = chain.has_goal;
  out.p_hat = chain.has_goal ? chain.goal : out.waypoints.back().position;
  return out;
}

std::vector<Waypoint> DecodedChain::execution_waypoints(double agent_height) const {
  std::vector<Waypoint> exec = waypoints;
  for (auto& wp : exec) wp.position.y = agent_height;
  if (has_goal_) exec.back().position = {p_hat.x, agent_height, p_hat.z};
  return exec;
}

std::string serialize_model_output(const ModelOutput& out) {
  json root = json::object();
  root["map_present"] = out.map.has_value();
  root["chain_present"] = out.chain.has_value();
  json jissues = json::array();
  for (const auto& issue : out.issues) {
    jissues.push_back(
        {{"severity", issue.severity == ParseIssue::Severity::Error ? "error" : "warning"},
         {"path", issue.path},
         {"message", issue.message}});
  }
  root["issues"] = std::move(jissues);
  root["raw_excerpt"] = out.raw_excerpt;
  return detail::canonical_dump(root);
}

std::string serialize_reference_output(const CognitiveMap& map, const PlanChain& chain) {
  json root = json::object();
  root["map"] = detail::map_to_json(map);
  root["chain"] = detail::chain_to_json(chain);
  return detail::canonical_dump(root);
}

}  // namespace cognav
