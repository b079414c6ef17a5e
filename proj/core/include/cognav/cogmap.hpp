#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cognav/geometry.hpp"
#include "cognav/scene.hpp"

namespace cognav {

// Compass bearings over the ground plane, 45-degree bins centered on
// multiples of 45: N is azimuth 0 (+Z), E is 90 (+X).
enum class DirBin { N, NE, E, SE, S, SW, W, NW };

const char* to_string(DirBin dir);
std::optional<DirBin> parse_dir(std::string_view text);
double bin_azimuth_deg(DirBin dir);

// Unit vector of the bin-center azimuth in (x, z); diagonals use the nearest
// double to sqrt(0.5) in both components.
void bin_unit(DirBin dir, double& ux, double& uz);

// Bin of the bearing from the origin to (dx, dz): theta = atan2(dx, dz)
// normalized to [0, 360), nearest bin center; a bearing exactly on a bin edge
// (odd multiple of 22.5 degrees) rounds toward the larger azimuth. Throws
// ZeroVectorError for (0, 0).
DirBin bearing_bin(double dx, double dz);

enum class VerticalRel { Same, On };

const char* to_string(VerticalRel rel);
std::optional<VerticalRel> parse_vertical(std::string_view text);

// `on` iff the object's bottom face rests on the landmark's top face within
// eps and their footprints overlap with positive area.
VerticalRel vertical_relation(const Box3D& obj, const Box3D& lm, double eps);

struct RelationDescriptor {
  DirBin dir = DirBin::N;
  VerticalRel h = VerticalRel::Same;
  double dist = 0.0;

  friend bool operator==(const RelationDescriptor&, const RelationDescriptor&) = default;
};

struct Landmark {
  std::string id;
  std::string semantic;
  Box2D bbox;
  // Scene object the landmark was selected from; equals `id` for landmarks
  // parsed from model output, which has no originating scene object.
  std::string source_object;

  friend bool operator==(const Landmark&, const Landmark&) = default;
};

struct ObjectAttachment {
  std::string object_id;
  std::string semantic;
  std::string anchor_landmark_id;
  // Measured from the anchor landmark to the object.
  RelationDescriptor relation;

  friend bool operator==(const ObjectAttachment&, const ObjectAttachment&) = default;
};

struct Region {
  std::string id;
  std::vector<std::string> landmark_ids;
  // Not serialized; room naming is out of scope.
  std::string label;

  friend bool operator==(const Region&, const Region&) = default;
};

struct CognitiveMap {
  std::vector<Region> regions;
  std::vector<Landmark> landmarks;
  std::vector<ObjectAttachment> attachments;

  const Landmark* find_landmark(std::string_view id) const;

  friend bool operator==(const CognitiveMap&, const CognitiveMap&) = default;
};

struct MapConfig {
  std::vector<std::string> exclusion_list = {"floor", "carpet", "rug",
                                             "ceiling", "wall", "door frame"};
  int max_landmarks = 20;
  double r0 = 2.0;
  double growth = 1.5;
  double eps_on = 0.05;
  // 0 selects k by the eigengap rule.
  int k = 0;
};

// Non-background objects ranked by footprint area descending (ties by id
// ascending), truncated to max_landmarks. Throws EmptySelectionError when
// nothing survives the exclusion list.
std::vector<Landmark> select_landmarks(const SceneAnnotation& scene, const MapConfig& cfg);

// Attaches every non-background, non-landmark object to a landmark: the
// search radius starts at r0 and multiplies by growth until it contains a
// landmark, capped at the scene diameter (then the global nearest wins).
// Among in-range landmarks the nearest center wins, ties by landmark id.
std::vector<ObjectAttachment> assign_objects(const SceneAnnotation& scene,
                                             const std::vector<Landmark>& landmarks,
                                             const MapConfig& cfg);

struct AffinityMatrix {
  int n = 0;
  // Row-major n*n, zero diagonal, symmetric.
  std::vector<double> values;
  double sigma = 0.0;
};

// A_ij = exp(-d_ij^2 / (2 sigma^2)) over ground-plane center distances, with
// sigma the median of the non-zero pairwise distances (mean of the middle two
// for an even count). Throws DegenerateGeometryError when all distances are
// zero.
AffinityMatrix affinity_matrix(const std::vector<Landmark>& landmarks);

// Spectral partition of the landmarks; k == 0 selects k by the largest
// eigengap among the first min(8, n) eigenvalues. Region ids are "r0",
// "r1", ... in order of first landmark appearance.
std::vector<Region> cluster_regions(const std::vector<Landmark>& landmarks, int k,
                                    std::uint64_t seed);

// Landmark selection, object attachment, and region clustering composed into
// one map. Deterministic in (scene, cfg, seed).
CognitiveMap build_cognitive_map(const SceneAnnotation& scene, const MapConfig& cfg,
                                 std::uint64_t seed);

// Canonical map document: {"regions", "landmarks", "objects"}.
std::string serialize_map(const CognitiveMap& map);

// Strict parse of a map document; throws SchemaError. For lenient extraction
// from model text use parse_model_output.
CognitiveMap parse_map(std::string_view text);

}  // namespace cognav
