#include "cognav/cogmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "canon_json.hpp"
#include "cognav/errors.hpp"
#include "cognav/spectral.hpp"
#include "doc_readers.hpp"

namespace cognav {

namespace {

// DirBin enumerators are ordered by azimuth, so azimuth = 45 * index.
constexpr const char* kDirNames[8] = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
constexpr double kDiag = 0.7071067811865476;

}  // namespace

const char* to_string(DirBin dir) { return kDirNames[static_cast<int>(dir)]; }

std::optional<DirBin> parse_dir(std::string_view text) {
  for (int i = 0; i < 8; ++i) {
    if (text == kDirNames[i]) return static_cast<DirBin>(i);
  }
  return std::nullopt;
}

double bin_azimuth_deg(DirBin dir) { return 45.0 * static_cast<int>(dir); }

void bin_unit(DirBin dir, double& ux, double& uz) {
  switch (dir) {
    case DirBin::N: ux = 0.0; uz = 1.0; return;
    case DirBin::NE: ux = kDiag; uz = kDiag; return;
    case DirBin::E: ux = 1.0; uz = 0.0; return;
    case DirBin::SE: ux = kDiag; uz = -kDiag; return;
    case DirBin::S: ux = 0.0; uz = -1.0; return;
    case DirBin::SW: ux = -kDiag; uz = -kDiag; return;
    case DirBin::W: ux = -1.0; uz = 0.0; return;
    case DirBin::NW: ux = -kDiag; uz = kDiag; return;
  }
  ux = 0.0;
  uz = 1.0;
}

DirBin bearing_bin(double dx, double dz) {
  if (dx == 0.0 && dz == 0.0) throw ZeroVectorError("bearing of a zero displacement is undefined");
  const double theta = normalize_deg(azimuth_deg(dx, dz));
  // Shift by half a bin so bin edges land on integers; the epsilon absorbs
  // the rounding noise of angles reconstructed through atan2, keeping edge
  // bearings in the larger-azimuth bin.
  const int idx = static_cast<int>(std::floor((theta + 22.5) / 45.0 + 1e-12)) % 8;
  return static_cast<DirBin>(idx);
}

const char* to_string(VerticalRel rel) { return rel == VerticalRel::On ? "on" : "same"; }

std::optional<VerticalRel> parse_vertical(std::string_view text) {
  if (text == "same") return VerticalRel::Same;
  if (text == "on") return VerticalRel::On;
  return std::nullopt;
}

VerticalRel vertical_relation(const Box3D& obj, const Box3D& lm, double eps) {
  if (std::abs(obj.y_min - lm.y_max) <= eps &&
      intersection_area(obj.footprint(), lm.footprint()) > 0.0) {
    return VerticalRel::On;
  }
  return VerticalRel::Same;
}

const Landmark* CognitiveMap::find_landmark(std::string_view id) const {
  for (const auto& lm : landmarks) {
    if (lm.id == id) return &lm;
  }
  return nullptr;
}

namespace {

bool excluded(const std::string& semantic, const std::vector<std::string>& exclusion_list) {
  return std::find(exclusion_list.begin(), exclusion_list.end(), semantic) !=
         exclusion_list.end();
}

}  // namespace

std::vector<Landmark> select_landmarks(const SceneAnnotation& scene, const MapConfig& cfg) {
  if (cfg.max_landmarks < 1) throw ConfigError("max_landmarks must be at least 1");
  std::vector<const ObjectInstance*> candidates;
  for (const auto& obj : scene.objects) {
    if (!excluded(obj.semantic, cfg.exclusion_list)) candidates.push_back(&obj);
  }
  if (candidates.empty()) {
    throw EmptySelectionError("no landmark candidates after background exclusion");
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const ObjectInstance* a, const ObjectInstance* b) {
              const double aa = a->box.footprint().area();
              const double ab = b->box.footprint().area();
              if (aa != ab) return aa > ab;
              return a->id < b->id;
            });
  if (candidates.size() > static_cast<std::size_t>(cfg.max_landmarks)) {
    candidates.resize(static_cast<std::size_t>(cfg.max_landmarks));
  }
  std::vector<Landmark> landmarks;
  landmarks.reserve(candidates.size());
  for (const ObjectInstance* obj : candidates) {
    landmarks.push_back({obj->id, obj->semantic, obj->box.footprint(), obj->id});
  }
  return landmarks;
}

std::vector<ObjectAttachment> assign_objects(const SceneAnnotation& scene,
                                             const std::vector<Landmark>& landmarks,
                                             const MapConfig& cfg) {
  if (landmarks.empty()) throw EmptySelectionError("cannot assign objects without landmarks");
  if (cfg.r0 <= 0.0 || cfg.growth <= 1.0) {
    throw ConfigError("radius schedule needs r0 > 0 and growth > 1");
  }
  const double diameter = scene.grid.extent_diagonal();

  std::vector<ObjectAttachment> attachments;
  for (const auto& obj : scene.objects) {
    if (excluded(obj.semantic, cfg.exclusion_list)) continue;
    const bool is_landmark =
        std::any_of(landmarks.begin(), landmarks.end(),
                    [&](const Landmark& lm) { return lm.source_object == obj.id; });
    if (is_landmark) continue;

    const WorldPoint oc = obj.box.footprint().center();
    const auto nearest_within = [&](double radius) -> const Landmark* {
      const Landmark* best = nullptr;
      double best_d = 0.0;
      for (const auto& lm : landmarks) {
        const double d = ground_distance(oc, lm.bbox.center());
        if (d > radius) continue;
        if (!best || d < best_d || (d == best_d && lm.id < best->id)) {
          best = &lm;
          best_d = d;
        }
      }
      return best;
    };

    const Landmark* anchor = nullptr;
    for (double radius = cfg.r0; radius <= diameter; radius *= cfg.growth) {
      anchor = nearest_within(radius);
      if (anchor) break;
    }
    if (!anchor) anchor = nearest_within(std::numeric_limits<double>::infinity());

    const WorldPoint lc = anchor->bbox.center();
    RelationDescriptor rel;
    rel.dist = ground_distance(lc, oc);
    const double dx = oc.x - lc.x;
    const double dz = oc.z - lc.z;
    rel.dir = (dx == 0.0 && dz == 0.0) ? DirBin::N : bearing_bin(dx, dz);
    const ObjectInstance* lm_obj = scene.find_object(anchor->source_object);
    rel.h = lm_obj ? vertical_relation(obj.box, lm_obj->box, cfg.eps_on) : VerticalRel::Same;
    attachments.push_back({obj.id, obj.semantic, anchor->id, rel});
  }
  return attachments;
}

AffinityMatrix affinity_matrix(const std::vector<Landmark>& landmarks) {
  const int n = static_cast<int>(landmarks.size());
  if (n < 2) throw ConfigError("affinity needs at least 2 landmarks");

  std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> nonzero;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d =
          ground_distance(landmarks[static_cast<std::size_t>(i)].bbox.center(),
                          landmarks[static_cast<std::size_t>(j)].bbox.center());
      dist[static_cast<std::size_t>(i) * n + j] = d;
      dist[static_cast<std::size_t>(j) * n + i] = d;
      if (d > 0.0) nonzero.push_back(d);
    }
  }
  if (nonzero.empty()) {
    throw DegenerateGeometryError("all landmark centers coincide; no affinity scale");
  }
  std::sort(nonzero.begin(), nonzero.end());
  const std::size_t m = nonzero.size();
  const double sigma =
      (m % 2 == 1) ? nonzero[m / 2] : 0.5 * (nonzero[m / 2 - 1] + nonzero[m / 2]);

  AffinityMatrix out;
  out.n = n;
  out.sigma = sigma;
  out.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = dist[static_cast<std::size_t>(i) * n + j];
      out.values[static_cast<std::size_t>(i) * n + j] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
  }
  return out;
}

std::vector<Region> cluster_regions(const std::vector<Landmark>& landmarks, int k,
                                    std::uint64_t seed) {
  const int n = static_cast<int>(landmarks.size());
  if (n < 2) throw ConfigError("clustering needs at least 2 landmarks");
  if (k != 0 && (k < 1 || k > n)) throw ConfigError("k must be in [1, landmark count] or auto");

  const AffinityMatrix aff = affinity_matrix(landmarks);
  const std::vector<int> labels = spectral_cluster(aff.values, n, k, seed);

  // Region ids follow first appearance over the landmark order.
  std::map<int, std::size_t> region_of_label;
  std::vector<Region> regions;
  for (int i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    auto it = region_of_label.find(label);
    if (it == region_of_label.end()) {
      it = region_of_label.emplace(label, regions.size()).first;
      regions.push_back({"r" + std::to_string(regions.size()), {}, ""});
    }
    regions[it->second].landmark_ids.push_back(landmarks[static_cast<std::size_t>(i)].id);
  }
  return regions;
}

CognitiveMap build_cognitive_map(const SceneAnnotation& scene, const MapConfig& cfg,
                                 std::uint64_t seed) {
  CognitiveMap map;
  map.landmarks = select_landmarks(scene, cfg);
  map.attachments = assign_objects(scene, map.landmarks, cfg);
  if (map.landmarks.size() == 1) {
    map.regions = {{"r0", {map.landmarks.front().id}, ""}};
  } else {
    map.regions = cluster_regions(map.landmarks, cfg.k, seed);
  }
  return map;
}

std::string serialize_map(const CognitiveMap& map) {
  return detail::canonical_dump(detail::map_to_json(map));
}

CognitiveMap parse_map(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  std::vector<ParseIssue> issues;
  auto map = detail::read_map(root, "", issues);
  for (const auto& issue : issues) {
    if (issue.severity == ParseIssue::Severity::Error) {
      throw SchemaError(issue.message, issue.path);
    }
  }
  if (!map) throw SchemaError("map did not validate");
  return std::move(*map);
}

}  // namespace cognav
