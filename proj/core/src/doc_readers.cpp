#include "doc_readers.hpp"

#include <cctype>
#include <cmath>

namespace cognav::detail {

using nlohmann::json;

std::string normalize_semantic(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return out;
}

namespace {

class IssueScope {
 public:
  IssueScope(std::vector<ParseIssue>& issues) : issues_(issues), start_(issues.size()) {}

  void error(const std::string& path, const std::string& message) {
    issues_.push_back({ParseIssue::Severity::Error, path, message});
  }
  void warning(const std::string& path, const std::string& message) {
    issues_.push_back({ParseIssue::Severity::Warning, path, message});
  }
  bool clean() const {
    for (std::size_t i = start_; i < issues_.size(); ++i) {
      if (issues_[i].severity == ParseIssue::Severity::Error) return false;
    }
    return true;
  }

 private:
  std::vector<ParseIssue>& issues_;
  std::size_t start_;
};

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void warn_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& path, IssueScope& scope) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) scope.warning(join(path, it.key()), "unknown field");
  }
}

std::optional<std::string> get_string(const json& obj, const char* key, const std::string& path,
                                      IssueScope& scope, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) scope.error(join(path, key), "missing field");
    return std::nullopt;
  }
  if (!it->is_string()) {
    scope.error(join(path, key), "expected string");
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<double> get_number(const json& obj, const char* key, const std::string& path,
                                 IssueScope& scope, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) scope.error(join(path, key), "missing field");
    return std::nullopt;
  }
  if (!it->is_number() || !std::isfinite(it->get<double>())) {
    scope.error(join(path, key), "expected finite number");
    return std::nullopt;
  }
  return it->get<double>();
}

std::optional<Box2D> read_box2(const json& v, const std::string& path, IssueScope& scope,
                               bool fatal) {
  const auto flag = [&](const std::string& p, const std::string& msg) {
    if (fatal) {
      scope.error(p, msg);
    } else {
      scope.warning(p, msg);
    }
  };
  if (!v.is_array() || v.size() != 4) {
    flag(path, "expected [x_min, x_max, z_min, z_max]");
    return std::nullopt;
  }
  double vals[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
      flag(at(path, i), "expected finite number");
      return std::nullopt;
    }
    vals[i] = v[i].get<double>();
  }
  if (vals[0] > vals[1] || vals[2] > vals[3]) {
    flag(path, "inverted box");
    return std::nullopt;
  }
  return Box2D{vals[0], vals[1], vals[2], vals[3]};
}

std::optional<DirBin> get_dir(const json& obj, const std::string& path, IssueScope& scope) {
  auto it = obj.find("dir");
  if (it == obj.end()) {
    scope.error(join(path, "dir"), "missing field");
    return std::nullopt;
  }
  if (!it->is_string()) {
    scope.error(join(path, "dir"), "expected string");
    return std::nullopt;
  }
  const auto dir = parse_dir(it->get<std::string>());
  if (!dir) {
    scope.error(join(path, "dir"), "not a compass bearing");
    return std::nullopt;
  }
  return dir;
}

VerticalRel get_vertical(const json& obj, const std::string& path, IssueScope& scope) {
  auto it = obj.find("h");
  if (it == obj.end()) {
    scope.warning(join(path, "h"), "missing field, assuming \"same\"");
    return VerticalRel::Same;
  }
  if (!it->is_string()) {
    scope.error(join(path, "h"), "expected string");
    return VerticalRel::Same;
  }
  const auto rel = parse_vertical(it->get<std::string>());
  if (!rel) {
    scope.error(join(path, "h"), "must be \"same\" or \"on\"");
    return VerticalRel::Same;
  }
  return *rel;
}

}  // namespace

std::optional<CognitiveMap> read_map(const json& j, const std::string& base,
                                     std::vector<ParseIssue>& issues) {
  IssueScope scope(issues);
  if (!j.is_object()) {
    scope.error(base, "expected object");
    return std::nullopt;
  }
  warn_unknown_keys(j, {"regions", "landmarks", "objects"}, base, scope);

  CognitiveMap map;
  const auto section = [&](const char* key) -> const json* {
    auto it = j.find(key);
    if (it == j.end()) {
      scope.warning(join(base, key), "missing field");
      return nullptr;
    }
    if (!it->is_array()) {
      scope.error(join(base, key), "expected array");
      return nullptr;
    }
    return &*it;
  };

  if (const json* jlms = section("landmarks")) {
    const std::string lms_path = join(base, "landmarks");
    for (std::size_t i = 0; i < jlms->size(); ++i) {
      const json& v = (*jlms)[i];
      const std::string path = at(lms_path, i);
      if (!v.is_object()) {
        scope.error(path, "expected object");
        continue;
      }
      warn_unknown_keys(v, {"id", "semantic", "bbox"}, path, scope);
      Landmark lm;
      if (auto id = get_string(v, "id", path, scope, true)) {
        lm.id = *id;
      } else {
        continue;
      }
      if (lm.id.empty()) {
        scope.error(join(path, "id"), "must be non-empty");
        continue;
      }
      if (auto sem = get_string(v, "semantic", path, scope, true)) {
        lm.semantic = normalize_semantic(*sem);
      } else {
        continue;
      }
      auto it = v.find("bbox");
      if (it == v.end()) {
        scope.error(join(path, "bbox"), "missing field");
        continue;
      }
      if (auto box = read_box2(*it, join(path, "bbox"), scope, true)) {
        lm.bbox = *box;
      } else {
        continue;
      }
      lm.source_object = lm.id;
      for (const auto& prev : map.landmarks) {
        if (prev.id == lm.id) {
          scope.error(join(path, "id"), "duplicate landmark id '" + lm.id + "'");
          break;
        }
      }
      map.landmarks.push_back(std::move(lm));
    }
  }

  if (const json* jregions = section("regions")) {
    const std::string regions_path = join(base, "regions");
    for (std::size_t i = 0; i < jregions->size(); ++i) {
      const json& v = (*jregions)[i];
      const std::string path = at(regions_path, i);
      if (!v.is_object()) {
        scope.error(path, "expected object");
        continue;
      }
      warn_unknown_keys(v, {"id", "landmarks"}, path, scope);
      Region region;
      if (auto id = get_string(v, "id", path, scope, true)) {
        region.id = *id;
      } else {
        continue;
      }
      auto it = v.find("landmarks");
      if (it == v.end()) {
        scope.error(join(path, "landmarks"), "missing field");
        continue;
      }
      if (!it->is_array()) {
        scope.error(join(path, "landmarks"), "expected array");
        continue;
      }
      for (std::size_t m = 0; m < it->size(); ++m) {
        if (!(*it)[m].is_string()) {
          scope.error(at(join(path, "landmarks"), m), "expected string");
          continue;
        }
        const std::string ref = (*it)[m].get<std::string>();
        if (!map.find_landmark(ref)) {
          scope.warning(at(join(path, "landmarks"), m), "references unknown landmark '" + ref + "'");
        }
        region.landmark_ids.push_back(ref);
      }
      map.regions.push_back(std::move(region));
    }
  }

  if (const json* jobjects = section("objects")) {
    const std::string objects_path = join(base, "objects");
    for (std::size_t i = 0; i < jobjects->size(); ++i) {
      const json& v = (*jobjects)[i];
      const std::string path = at(objects_path, i);
      if (!v.is_object()) {
        scope.error(path, "expected object");
        continue;
      }
      warn_unknown_keys(v, {"id", "semantic", "anchor", "dir", "h", "dist"}, path, scope);
      ObjectAttachment att;
      bool ok = true;
      if (auto id = get_string(v, "id", path, scope, true)) {
        att.object_id = *id;
      } else {
        ok = false;
      }
      if (auto sem = get_string(v, "semantic", path, scope, true)) {
        att.semantic = normalize_semantic(*sem);
      } else {
        ok = false;
      }
      if (auto anchor = get_string(v, "anchor", path, scope, true)) {
        att.anchor_landmark_id = *anchor;
        if (!map.find_landmark(*anchor)) {
          scope.warning(join(path, "anchor"), "references unknown landmark '" + *anchor + "'");
        }
      } else {
        ok = false;
      }
      if (auto dir = get_dir(v, path, scope)) {
        att.relation.dir = *dir;
      } else {
        ok = false;
      }
      att.relation.h = get_vertical(v, path, scope);
      if (auto dist = get_number(v, "dist", path, scope, true)) {
        if (*dist < 0.0) {
          scope.error(join(path, "dist"), "must be non-negative");
          ok = false;
        } else {
          att.relation.dist = *dist;
        }
      } else {
        ok = false;
      }
      if (ok) map.attachments.push_back(std::move(att));
    }
  }

  if (!scope.clean()) return std::nullopt;
  return map;
}

std::optional<PlanChain> read_chain(const json& j, const std::string& base,
                                    std::vector<ParseIssue>& issues) {
  IssueScope scope(issues);
  if (!j.is_object()) {
    scope.error(base, "expected object");
    return std::nullopt;
  }
  warn_unknown_keys(j, {"steps", "goal"}, base, scope);

  PlanChain chain;
  chain.has_goal = false;
  auto steps_it = j.find("steps");
  if (steps_it == j.end()) {
    scope.error(join(base, "steps"), "missing field");
    return std::nullopt;
  }
  if (!steps_it->is_array()) {
    scope.error(join(base, "steps"), "expected array");
    return std::nullopt;
  }
  if (steps_it->empty()) {
    scope.error(join(base, "steps"), "chain must have at least one step");
    return std::nullopt;
  }
  const std::string steps_path = join(base, "steps");
  for (std::size_t i = 0; i < steps_it->size(); ++i) {
    const json& v = (*steps_it)[i];
    const std::string path = at(steps_path, i);
    if (!v.is_object()) {
      scope.error(path, "expected object");
      continue;
    }
    warn_unknown_keys(v, {"lm", "sem", "dir", "dist", "h", "bbox"}, path, scope);
    PlanStep step;
    if (auto lm = get_string(v, "lm", path, scope, false)) step.lm = *lm;
    if (auto sem = get_string(v, "sem", path, scope, false)) step.sem = normalize_semantic(*sem);
    if (step.lm.empty() && step.sem.empty()) {
      scope.error(path, "step needs a landmark reference (lm or sem)");
    }
    if (auto dir = get_dir(v, path, scope)) step.rel.dir = *dir;
    if (auto dist = get_number(v, "dist", path, scope, true)) {
      if (*dist < 0.0) {
        scope.error(join(path, "dist"), "must be non-negative");
      } else {
        step.rel.dist = *dist;
      }
    }
    step.rel.h = get_vertical(v, path, scope);
    if (auto bbox_it = v.find("bbox"); bbox_it != v.end()) {
      if (auto box = read_box2(*bbox_it, join(path, "bbox"), scope, false)) step.bbox = *box;
    }
    chain.steps.push_back(std::move(step));
  }

  if (auto goal_it = j.find("goal"); goal_it != j.end()) {
    const std::string goal_path = join(base, "goal");
    bool goal_ok = goal_it->is_array() && goal_it->size() == 2;
    if (goal_ok) {
      for (const auto& v : *goal_it) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) goal_ok = false;
      }
    }
    if (goal_ok) {
      chain.goal = {(*goal_it)[0].get<double>(), 0.0, (*goal_it)[1].get<double>()};
      chain.has_goal = true;
    } else {
      scope.warning(goal_path, "expected [x, z], ignoring goal");
    }
  }

  if (!scope.clean()) return std::nullopt;
  return chain;
}

json map_to_json(const CognitiveMap& map) {
  json root = json::object();
  json jregions = json::array();
  for (const auto& r : map.regions) {
    jregions.push_back({{"id", r.id}, {"landmarks", r.landmark_ids}});
  }
  root["regions"] = std::move(jregions);
  json jlms = json::array();
  for (const auto& lm : map.landmarks) {
    jlms.push_back({{"id", lm.id},
                    {"semantic", lm.semantic},
                    {"bbox", {lm.bbox.x_min, lm.bbox.x_max, lm.bbox.z_min, lm.bbox.z_max}}});
  }
  root["landmarks"] = std::move(jlms);
  json jobjects = json::array();
  for (const auto& att : map.attachments) {
    jobjects.push_back({{"id", att.object_id},
                        {"semantic", att.semantic},
                        {"anchor", att.anchor_landmark_id},
                        {"dir", to_string(att.relation.dir)},
                        {"h", to_string(att.relation.h)},
                        {"dist", att.relation.dist}});
  }
  root["objects"] = std::move(jobjects);
  return root;
}

json chain_to_json(const PlanChain& chain) {
  json root = json::object();
  json jsteps = json::array();
  for (const auto& s : chain.steps) {
    jsteps.push_back({{"lm", s.lm},
                      {"sem", s.sem},
                      {"dir", to_string(s.rel.dir)},
                      {"dist", s.rel.dist},
                      {"h", to_string(s.rel.h)},
                      {"bbox", {s.bbox.x_min, s.bbox.x_max, s.bbox.z_min, s.bbox.z_max}}});
  }
  root["steps"] = std::move(jsteps);
  if (chain.has_goal) root["goal"] = {chain.goal.x, chain.goal.z};
  return root;
}

}  // namespace cognav::detail
