#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cognav/codec.hpp"
#include "cognav/cogmap.hpp"
#include "cognav/cogrs.hpp"
#include "cognav/commands.hpp"
#include "cognav/config.hpp"
#include "cognav/errors.hpp"
#include "cognav/geometry.hpp"
#include "cognav/metrics.hpp"
#include "cognav/planner.hpp"
#include "cognav/rng.hpp"
#include "cognav/scene.hpp"
#include "cognav/spectral.hpp"
#include "cognav/synth.hpp"
#include "cognav/tasks.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cognav;

namespace {

constexpr double kRoot2 = 1.4142135623730951;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  REQUIRE(out.good());
}

// '.' navigable, '#' blocked; rows[0] is row 0.
OccupancyGrid grid_from_rows(double res, WorldPoint origin, const std::vector<std::string>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows[0].size());
  std::vector<std::uint8_t> cells;
  cells.reserve(static_cast<std::size_t>(w) * h);
  for (const std::string& row : rows) {
    for (char c : row) cells.push_back(c == '.' ? 1 : 0);
  }
  return OccupancyGrid(res, origin, w, h, std::move(cells));
}

OccupancyGrid open_grid(int w, int h, double res = 0.1, WorldPoint origin = {0, 0, 0}) {
  return OccupancyGrid(res, origin, w, h,
                       std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 1));
}

// Independent uniform-cost search used as the shortest-path oracle.
std::vector<std::optional<StepCost>> ucs_from(const OccupancyGrid& grid, Cell src) {
  const int w = grid.width();
  const int h = grid.height();
  const std::size_t total = static_cast<std::size_t>(w) * h;
  constexpr int dc[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  constexpr int dr[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  struct E {
    StepCost g;
    std::int32_t idx;
  };
  struct Worse {
    bool operator()(const E& a, const E& b) const { return cost_less(b.g, a.g); }
  };
  std::vector<std::optional<StepCost>> dist(total);
  std::vector<std::uint8_t> done(total, 0);
  std::priority_queue<E, std::vector<E>, Worse> open;
  const std::int32_t s = src.row * w + src.col;
  dist[s] = StepCost{0, 0};
  open.push({{0, 0}, s});
  while (!open.empty()) {
    const E top = open.top();
    open.pop();
    if (done[top.idx]) continue;
    done[top.idx] = 1;
    const int cc = top.idx % w;
    const int cr = top.idx / w;
    for (int n = 0; n < 8; ++n) {
      const Cell next{cc + dc[n], cr + dr[n]};
      if (!grid.navigable(next)) continue;
      const std::int32_t ni = next.row * w + next.col;
      if (done[ni]) continue;
      StepCost ng = top.g;
      if (dc[n] != 0 && dr[n] != 0) {
        ++ng.diagonal;
      } else {
        ++ng.axial;
      }
      if (!dist[ni] || cost_less(ng, *dist[ni])) {
        dist[ni] = ng;
        open.push({ng, ni});
      }
    }
  }
  return dist;
}

ObjectInstance make_object(const std::string& id, const std::string& sem, double x0, double x1,
                           double y0, double y1, double z0, double z1) {
  return {id, sem, {x0, x1, y0, y1, z0, z1}};
}

// All-navigable 10x10 m scene with caller-provided objects.
SceneAnnotation make_scene(std::vector<ObjectInstance> objects, const std::string& id = "mini") {
  SceneAnnotation scene;
  scene.scene_id = id;
  scene.objects = std::move(objects);
  scene.grid = open_grid(100, 100, 0.1, {0.05, 0, 0.05});
  scene.floorplan = {50.0, 0.0, 0.0, 500, 500};
  return scene;
}

Landmark make_landmark(const std::string& id, const std::string& sem, double cx, double cz,
                       double half = 0.1) {
  return {id, sem, {cx - half, cx + half, cz - half, cz + half}, id};
}

// Straight 14 m corridor walk passing three route landmarks with a long
// landmark-free stretch whose nearest landmark (L4) sits beyond the corridor
// radius, so its cue can only come from the stretch rule.
struct CorridorFixture {
  OccupancyGrid grid = open_grid(145, 11);
  CognitiveMap map;
  GridPath path;

  CorridorFixture() {
    map.landmarks = {make_landmark("L1", "fridge", 1.0, 1.5),
                     make_landmark("L2", "sofa", 4.5, 1.5),
                     make_landmark("L3", "bed", 13.0, 1.0),
                     make_landmark("L4", "piano", 8.5, 2.2)};
    PathPlanner planner(grid);
    path = *planner.shortest_path({2, 5}, {142, 5});
  }
};

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("cognav_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str(const std::string& name) const { return (path / name).string(); }
};

int run_build_map(const std::string& scene, const std::string& out, std::string* err_text = nullptr) {
  std::ostringstream out_s;
  std::ostringstream err_s;
  const int rc = cmd_build_map(scene, "", 7, out, {out_s, err_s});
  if (err_text) *err_text = err_s.str();
  return rc;
}

std::string minimal_scene_json() {
  return R"({
  "floorplan": {"image_size": [40, 40], "offset": [0, 0], "scale": 10},
  "grid": {"height": 4, "origin": [0.5, 0, 0.5], "resolution": 1.0,
           "rows": ["....", "....", "....", "...."], "width": 4},
  "objects": [{"box": {"x": [1.0, 2.0], "y": [0.0, 1.0], "z": [1.0, 2.0]},
               "id": "t01", "semantic": "table"}],
  "scene_id": "mini"
})";
}

std::string record_line(const std::string& id, const std::vector<double>& logprobs,
                        const std::vector<std::pair<int, int>>& spans) {
  nlohmann::json j;
  j["sample_id"] = id;
  j["tokens"] = nlohmann::json::array();
  for (double lp : logprobs) j["tokens"].push_back({{"text", "w"}, {"logprob", lp}});
  j["critical_spans"] = nlohmann::json::array();
  for (auto [a, b] : spans) j["critical_spans"].push_back({a, b});
  return j.dump();
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("footprint areas") {
    const Box3D unit{0, 1, 0, 1, 0, 1};
    CHECK(unit.footprint() == Box2D{0, 1, 0, 1});
    CHECK(unit.footprint().area() == 1.0);
    const Box3D flat{2, 2, 0, 1, 0, 3};
    CHECK(flat.footprint().area() == 0.0);
    const SceneAnnotation scene = fixture_scene(1);
    const ObjectInstance* sofa = scene.find_object("o02");
    REQUIRE(sofa != nullptr);
    CHECK(sofa->semantic == "sofa");
    CHECK(sofa->box.footprint().area() == doctest::Approx(2.42).epsilon(1e-12));
  }

  TEST_CASE("iou basics") {
    const Box2D a{0, 1, 0, 1};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, {2, 3, 0, 1}) == 0.0);
    CHECK(iou(a, {0.25, 1.25, 0, 1}) == 0.6);
  }

  TEST_CASE("floorplan mapping") {
    const FloorplanMapping m{10.0, 0.0, 0.0, 400, 300};
    const auto [px, pz] = world_to_pixel(m, {1.5, 0, 2.0});
    CHECK(px == 15.0);
    CHECK(pz == 20.0);
    const WorldPoint back = pixel_to_world(m, px, pz);
    CHECK(ground_distance(back, {1.5, 0, 2.0}) < 0.05);
    const FloorplanMapping shifted{1.0, 100.0, 100.0, 400, 300};
    const auto [qx, qz] = world_to_pixel(shifted, {0, 0, 0});
    CHECK(qx == 100.0);
    CHECK(qz == 100.0);
  }

  TEST_CASE("bearing bins") {
    CHECK(bearing_bin(0, 1) == DirBin::N);
    CHECK(bearing_bin(1, 0) == DirBin::E);
    CHECK(bearing_bin(1, 1) == DirBin::NE);
    CHECK(bearing_bin(-1, -1) == DirBin::SW);
    CHECK_THROWS_AS(bearing_bin(0, 0), ZeroVectorError);
    // A bearing exactly on a bin edge rounds toward the larger azimuth.
    const double rad = 22.5 * 3.14159265358979323846 / 180.0;
    CHECK(bearing_bin(std::sin(rad), std::cos(rad)) == DirBin::NE);
    for (int i = 0; i < 8; ++i) {
      const double az = 45.0 * i;
      const double r = az * 3.14159265358979323846 / 180.0;
      CHECK(bearing_bin(std::sin(r), std::cos(r)) == static_cast<DirBin>(i == 0 ? 0 : i));
      CHECK(parse_dir(to_string(static_cast<DirBin>(i))) == static_cast<DirBin>(i));
      CHECK(bin_azimuth_deg(static_cast<DirBin>(i)) == az);
    }
  }

  TEST_CASE("vertical relation") {
    const Box3D table{0, 1, 0, 0.75, 0, 1};
    const Box3D book{0.2, 0.4, 0.75, 0.8, 0.2, 0.4};
    CHECK(vertical_relation(book, table, 0.05) == VerticalRel::On);
    const Box3D chair{1.2, 1.6, 0, 0.45, 0, 0.4};
    CHECK(vertical_relation(chair, table, 0.05) == VerticalRel::Same);
    const Box3D lamp{0.2, 0.4, 0.95, 1.2, 0.2, 0.4};
    CHECK(vertical_relation(lamp, table, 0.05) == VerticalRel::Same);
  }

  TEST_CASE("angle helpers") {
    CHECK(normalize_deg(-90.0) == 270.0);
    CHECK(normalize_deg(720.0) == 0.0);
    CHECK(azimuth_deg(1, 0) == doctest::Approx(90.0));
    CHECK(azimuth_deg(0, 1) == 0.0);
  }
}

TEST_SUITE("scene") {
  TEST_CASE("minimal document parses") {
    const SceneAnnotation scene = parse_scene(minimal_scene_json());
    CHECK(scene.scene_id == "mini");
    CHECK(scene.objects.size() == 1);
    CHECK(scene.grid.navigable_count() == 16);
    CHECK(scene.grid.width() == 4);
    CHECK(scene.find_object("t01") != nullptr);
  }

  TEST_CASE("inverted box names the object") {
    std::string doc = minimal_scene_json();
    const auto pos = doc.find("[1.0, 2.0]");
    doc.replace(pos, 10, "[2.0, 1.0]");
    try {
      parse_scene(doc);
      FAIL("expected GeometryError");
    } catch (const GeometryError& e) {
      CHECK(std::string(e.what()).find("t01") != std::string::npos);
    }
  }

  TEST_CASE("duplicate ids rejected") {
    SceneAnnotation scene = make_scene({make_object("a", "sofa", 0, 1, 0, 1, 0, 1),
                                        make_object("a", "bed", 2, 3, 0, 1, 2, 3)});
    CHECK_THROWS_AS(parse_scene(serialize_scene(scene)), GeometryError);
  }

  TEST_CASE("box outside the extent rejected") {
    SceneAnnotation scene = make_scene({make_object("far", "sofa", 40, 41, 0, 1, 0, 1)});
    CHECK_THROWS_AS(parse_scene(serialize_scene(scene)), GeometryError);
  }

  TEST_CASE("fully blocked grid rejected") {
    std::string doc = minimal_scene_json();
    std::size_t pos = 0;
    while ((pos = doc.find("....", pos)) != std::string::npos) doc.replace(pos, 4, "####");
    CHECK_THROWS_AS(parse_scene(doc), GridError);
  }

  TEST_CASE("unknown key rejected") {
    std::string doc = minimal_scene_json();
    doc.insert(doc.rfind('}'), ", \"extra\": 1\n");
    CHECK_THROWS_AS(parse_scene(doc), SchemaError);
  }

  TEST_CASE("serialization round-trip") {
    const SceneAnnotation scene = fixture_scene(2);
    const std::string text = serialize_scene(scene);
    CHECK(parse_scene(text) == scene);
    CHECK(serialize_scene(parse_scene(text)) == text);
  }

  TEST_CASE("bundled files match the synthesizer") {
    for (int i = 1; i <= 3; ++i) {
      const SceneAnnotation scene = fixture_scene(i);
      const fs::path file =
          fs::path(COGNAV_DATA_DIR) / "scenes" / (scene.scene_id + ".json");
      CHECK(serialize_scene(scene) == read_file(file));
    }
  }
}

TEST_SUITE("landmarks") {
  TEST_CASE("exclusion list and area ordering") {
    const SceneAnnotation scene = make_scene({
        make_object("f", "floor", 0, 10, -0.1, 0, 0, 10),
        make_object("s", "sofa", 0, 2, 0, 0.9, 0, 1.2),
        make_object("l", "lamp", 5, 5.3, 0, 1.5, 5, 5.3),
    });
    MapConfig cfg;
    cfg.max_landmarks = 2;
    const auto lms = select_landmarks(scene, cfg);
    REQUIRE(lms.size() == 2);
    CHECK(lms[0].semantic == "sofa");
    CHECK(lms[1].semantic == "lamp");
  }

  TEST_CASE("equal areas tie by id") {
    const SceneAnnotation scene = make_scene({make_object("b", "crate", 3, 4, 0, 1, 3, 4),
                                              make_object("a", "chest", 6, 7, 0, 1, 6, 7)});
    const auto lms = select_landmarks(scene, MapConfig{});
    REQUIRE(lms.size() == 2);
    CHECK(lms[0].id == "a");
    CHECK(lms[1].id == "b");
  }

  TEST_CASE("fixture selection equals the sort oracle") {
    const SceneAnnotation scene = fixture_scene(1);
    MapConfig cfg;
    cfg.max_landmarks = 6;
    const auto lms = select_landmarks(scene, cfg);
    struct Key {
      double area;
      std::string id;
    };
    std::vector<Key> oracle;
    for (const auto& obj : scene.objects) {
      const bool excluded =
          std::find(cfg.exclusion_list.begin(), cfg.exclusion_list.end(), obj.semantic) !=
          cfg.exclusion_list.end();
      if (!excluded) oracle.push_back({obj.box.footprint().area(), obj.id});
    }
    std::sort(oracle.begin(), oracle.end(), [](const Key& a, const Key& b) {
      if (a.area != b.area) return a.area > b.area;
      return a.id < b.id;
    });
    REQUIRE(lms.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(lms[i].id == oracle[i].id);
  }

  TEST_CASE("background-only scene has no landmarks") {
    const SceneAnnotation scene = make_scene({make_object("f", "floor", 0, 10, -0.1, 0, 0, 10)});
    CHECK_THROWS_AS(select_landmarks(scene, MapConfig{}), EmptySelectionError);
  }

  TEST_CASE("attachment direction and distance") {
    const SceneAnnotation scene = make_scene({make_object("lm", "table", 4.5, 5.5, 0, 1, 4.5, 5.5),
                                              make_object("ob", "mug", 4.9, 5.1, 0, 0.2, 5.9, 6.1)});
    MapConfig cfg;
    cfg.max_landmarks = 1;
    const auto lms = select_landmarks(scene, cfg);
    const auto atts = assign_objects(scene, lms, cfg);
    REQUIRE(atts.size() == 1);
    CHECK(atts[0].object_id == "ob");
    CHECK(atts[0].anchor_landmark_id == lms[0].id);
    CHECK(atts[0].relation.dir == DirBin::N);
    CHECK(atts[0].relation.h == VerticalRel::Same);
    CHECK(atts[0].relation.dist == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("resting object reads as on") {
    const SceneAnnotation scene =
        make_scene({make_object("lm", "table", 4, 6, 0, 0.75, 4, 6),
                    make_object("ob", "vase", 4.8, 5.2, 0.75, 1.0, 4.8, 5.2)});
    MapConfig cfg;
    cfg.max_landmarks = 1;
    const auto atts = assign_objects(scene, select_landmarks(scene, cfg), cfg);
    REQUIRE(atts.size() == 1);
    CHECK(atts[0].relation.h == VerticalRel::On);
  }

  TEST_CASE("equidistant anchors tie by id") {
    std::vector<Landmark> lms = {make_landmark("a", "shelf", 3.0, 5.0),
                                 make_landmark("b", "crate", 7.0, 5.0)};
    const SceneAnnotation scene = make_scene({make_object("ob", "mug", 4.9, 5.1, 0, 0.2, 4.9, 5.1)});
    const auto atts = assign_objects(scene, lms, MapConfig{});
    REQUIRE(atts.size() == 1);
    CHECK(atts[0].anchor_landmark_id == "a");
    CHECK(atts[0].relation.dist == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("distant anchor found by radius growth") {
    // Nearest landmark at 7 m: the search succeeds once the radius schedule
    // 2, 3, 4.5, 6.75, 10.125 passes it, and matches the nearest-neighbor
    // oracle.
    std::vector<Landmark> lms = {make_landmark("near", "shelf", 8.0, 1.0),
                                 make_landmark("far", "crate", 1.0, 9.5)};
    const SceneAnnotation scene = make_scene({make_object("ob", "mug", 0.9, 1.1, 0, 0.2, 0.9, 1.1)});
    const auto atts = assign_objects(scene, lms, MapConfig{});
    REQUIRE(atts.size() == 1);
    double best = 1e18;
    std::string best_id;
    for (const auto& lm : lms) {
      const double d = ground_distance(lm.bbox.center(), {1.0, 0, 1.0});
      if (d < best) {
        best = d;
        best_id = lm.id;
      }
    }
    CHECK(atts[0].anchor_landmark_id == best_id);
    CHECK(atts[0].relation.dist == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_SUITE("regions") {
  TEST_CASE("affinity at the median scale") {
    const std::vector<Landmark> pair = {make_landmark("a", "x", 0, 0),
                                        make_landmark("b", "y", 3.0, 0)};
    const AffinityMatrix am = affinity_matrix(pair);
    CHECK(am.sigma == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(am.values[0 * 2 + 1] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(am.values[1 * 2 + 0] == am.values[0 * 2 + 1]);
    CHECK(am.values[0] == 0.0);
    CHECK(am.values[3] == 0.0);
  }

  TEST_CASE("collinear triple") {
    const std::vector<Landmark> lms = {make_landmark("a", "x", 0, 0),
                                       make_landmark("b", "y", 1.0, 0),
                                       make_landmark("c", "z", 2.0, 0)};
    const AffinityMatrix am = affinity_matrix(lms);
    CHECK(am.sigma == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(am.values[0 * 3 + 2] == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(am.values[0 * 3 + 1] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  }

  TEST_CASE("coincident landmarks are degenerate") {
    const std::vector<Landmark> lms = {make_landmark("a", "x", 1, 1), make_landmark("b", "y", 1, 1)};
    CHECK_THROWS_AS(affinity_matrix(lms), DegenerateGeometryError);
  }

  TEST_CASE("single region and singletons") {
    std::vector<Landmark> lms;
    for (int i = 0; i < 5; ++i)
      lms.push_back(make_landmark("l" + std::to_string(i), "x", 1.0 * i, 0.5 * (i % 2)));
    const auto one = cluster_regions(lms, 1, 0);
    REQUIRE(one.size() == 1);
    CHECK(one[0].id == "r0");
    CHECK(one[0].landmark_ids.size() == 5);
    const auto all = cluster_regions(lms, 5, 0);
    CHECK(all.size() == 5);
    for (const auto& r : all) CHECK(r.landmark_ids.size() == 1);
  }

  TEST_CASE("well separated blobs split cleanly") {
    std::vector<Landmark> lms;
    Rng rng(11);
    for (int i = 0; i < 5; ++i)
      lms.push_back(make_landmark("a" + std::to_string(i), "x", rng.real(0.0, 0.5),
                                  rng.real(0.0, 0.5)));
    for (int i = 0; i < 5; ++i)
      lms.push_back(make_landmark("b" + std::to_string(i), "x", 20.0 + rng.real(0.0, 0.5),
                                  rng.real(0.0, 0.5)));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto regions = cluster_regions(lms, 2, seed);
      REQUIRE(regions.size() == 2);
      for (const auto& region : regions) {
        REQUIRE(region.landmark_ids.size() == 5);
        const char first = region.landmark_ids[0][0];
        for (const auto& id : region.landmark_ids) CHECK(id[0] == first);
      }
    }
  }

  TEST_CASE("automatic cluster count on a dominant blob") {
    // 12 tight landmarks plus 3 far ones: the median pairwise distance is an
    // intra-blob one, so the cross-blob affinity collapses and the spectrum
    // shows exactly two near-zero eigenvalues.
    std::vector<Landmark> lms;
    Rng rng(11);
    for (int i = 0; i < 12; ++i)
      lms.push_back(make_landmark("a" + std::to_string(i), "x", rng.real(0.0, 0.5),
                                  rng.real(0.0, 0.5)));
    for (int i = 0; i < 3; ++i)
      lms.push_back(make_landmark("b" + std::to_string(i), "x", 20.0 + rng.real(0.0, 0.5),
                                  rng.real(0.0, 0.5)));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto regions = cluster_regions(lms, 0, seed);
      REQUIRE(regions.size() == 2);
      for (const auto& region : regions) {
        const char first = region.landmark_ids[0][0];
        for (const auto& id : region.landmark_ids) CHECK(id[0] == first);
      }
    }
  }

  TEST_CASE("eigensystem sanity on a hand matrix") {
    const std::vector<double> sym = {2, 1, 1, 2};
    const EigenSystem es = jacobi_eigensystem(sym, 2);
    REQUIRE(es.values.size() == 2);
    CHECK(es.values[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(es.values[1] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(eigengap_k({0.0, 0.1, 1.5, 1.6}, 3) == 2);
  }

  TEST_CASE("fixture map shape is stable") {
    const SceneAnnotation scene = fixture_scene(1);
    MapConfig cfg;
    cfg.max_landmarks = 6;
    cfg.k = 2;
    const CognitiveMap first = build_cognitive_map(scene, cfg, 7);
    CHECK(first.landmarks.size() == 6);
    CHECK(first.attachments.size() == 5);
    CHECK(first.regions.size() == 2);
    for (int run = 0; run < 10; ++run) {
      CHECK(build_cognitive_map(scene, cfg, 7) == first);
    }
  }

  TEST_CASE("single object map") {
    const SceneAnnotation scene = make_scene({make_object("s", "sofa", 1, 3, 0, 1, 1, 2)});
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    CHECK(map.landmarks.size() == 1);
    CHECK(map.attachments.empty());
    CHECK(map.regions.size() == 1);
  }

  TEST_CASE("map serialization round-trip") {
    MapConfig cfg;
    cfg.max_landmarks = 6;
    cfg.k = 2;
    const CognitiveMap map = build_cognitive_map(fixture_scene(1), cfg, 7);
    const std::string text = serialize_map(map);
    const CognitiveMap back = parse_map(text);
    CHECK(back.landmarks.size() == map.landmarks.size());
    CHECK(back.attachments.size() == map.attachments.size());
    CHECK(back.regions.size() == map.regions.size());
    CHECK(serialize_map(back) == text);
  }
}

TEST_SUITE("planner") {
  TEST_CASE("exact cost comparison") {
    CHECK(cost_less({0, 2}, {3, 0}));       // 2*sqrt(2) < 3
    CHECK_FALSE(cost_less({3, 0}, {0, 2}));
    CHECK(cost_less({2, 0}, {1, 1}));       // 2 < 1 + sqrt(2)
    CHECK_FALSE(cost_less({1, 1}, {1, 1}));
    CHECK(StepCost{1, 1} == StepCost{1, 1});
    CHECK(StepCost{2, 3}.length(0.5) == doctest::Approx(0.5 * (2 + 3 * kRoot2)).epsilon(1e-15));
  }

  TEST_CASE("trivial paths") {
    const OccupancyGrid grid = open_grid(10, 10);
    PathPlanner planner(grid);
    const auto self = planner.shortest_path({3, 4}, {3, 4});
    REQUIRE(self.has_value());
    CHECK(self->cells.size() == 1);
    CHECK(self->length_m == 0.0);
    const auto diag = planner.shortest_path({0, 0}, {9, 9});
    REQUIRE(diag.has_value());
    CHECK(diag->cells.size() == 10);
    CHECK(diag->length_m == doctest::Approx(9 * kRoot2 * 0.1).epsilon(1e-12));
    CHECK(planner.path_cost({0, 0}, {9, 9}) == StepCost{0, 9});
  }

  TEST_CASE("blocked endpoints throw") {
    const OccupancyGrid grid = grid_from_rows(0.1, {0, 0, 0}, {"..#", "...", "..."});
    PathPlanner planner(grid);
    CHECK_THROWS_AS(planner.shortest_path({2, 0}, {0, 0}), BlockedEndpointError);
    CHECK_THROWS_AS(planner.shortest_path({0, 0}, {5, 5}), BlockedEndpointError);
  }

  TEST_CASE("walled-off goal is unreachable") {
    const OccupancyGrid grid = grid_from_rows(0.1, {0, 0, 0}, {"..#..", "..#..", "..#.."});
    PathPlanner planner(grid);
    CHECK_FALSE(planner.path_cost({0, 1}, {4, 1}).has_value());
    CHECK_FALSE(planner.shortest_path({0, 1}, {4, 1}).has_value());
  }

  TEST_CASE("costs equal the uniform-cost oracle") {
    for (std::uint64_t seed : {7, 8, 9}) {
      const OccupancyGrid grid = random_obstacle_grid(seed, 20, 20, 0.3);
      PathPlanner planner(grid);
      std::vector<Cell> nav;
      for (int r = 0; r < grid.height(); ++r)
        for (int c = 0; c < grid.width(); ++c)
          if (grid.navigable({c, r})) nav.push_back({c, r});
      for (std::size_t si = 0; si < nav.size(); si += nav.size() / 5) {
        const auto oracle = ucs_from(grid, nav[si]);
        for (const Cell& target : nav) {
          const auto got = planner.path_cost(nav[si], target);
          const auto& want = oracle[static_cast<std::size_t>(target.row) * grid.width() + target.col];
          REQUIRE(got.has_value() == want.has_value());
          if (got) CHECK(*got == *want);
        }
      }
    }
  }

  TEST_CASE("repeat queries are identical") {
    const OccupancyGrid grid = random_obstacle_grid(12, 20, 20, 0.3);
    std::vector<Cell> nav;
    for (int r = 0; r < grid.height(); ++r)
      for (int c = 0; c < grid.width(); ++c)
        if (grid.navigable({c, r})) nav.push_back({c, r});
    REQUIRE(nav.size() >= 2);
    PathPlanner planner(grid);
    const auto first = planner.shortest_path(nav.front(), nav.back());
    const auto second = planner.shortest_path(nav.front(), nav.back());
    PathPlanner fresh(grid);
    const auto third = fresh.shortest_path(nav.front(), nav.back());
    REQUIRE(first.has_value());
    CHECK(first->cells == second->cells);
    CHECK(first->cells == third->cells);
  }

  TEST_CASE("oversized grids are refused") {
    CHECK_THROWS_AS(PathPlanner(open_grid(900, 900, 0.1)), GridError);
  }

  TEST_CASE("snapping") {
    const OccupancyGrid grid = grid_from_rows(
        0.1, {0.05, 0, 0.05},
        std::vector<std::string>(20, "........############"));
    const auto exact = snap_to_navigable(grid, {0.25, 0, 0.35}, 0.5);
    REQUIRE(exact.has_value());
    CHECK(*exact == Cell{2, 3});
    const auto nudged = snap_to_navigable(grid, {0.93, 0, 0.35}, 0.5);
    REQUIRE(nudged.has_value());
    CHECK(nudged->col == 7);
    CHECK_FALSE(snap_to_navigable(grid, {1.75, 0, 1.0}, 0.5).has_value());
    CHECK_THROWS_AS(snap_to_navigable(grid, {0, 0, 0}, -1.0), ConfigError);
  }

  TEST_CASE("geodesic through a straight corridor") {
    const OccupancyGrid grid = open_grid(60, 1, 0.1, {0.05, 0, 0.05});
    const auto d = geodesic_distance(grid, {0.55, 0, 0.05}, {5.55, 0, 0.05}, 0.5);
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(5.0).epsilon(0.1 / 5.0));
  }

  TEST_CASE("geodesic between sealed rooms") {
    const OccupancyGrid grid = grid_from_rows(0.1, {0.05, 0, 0.05},
                                              std::vector<std::string>(3, "..#.."));
    CHECK_FALSE(geodesic_distance(grid, {0.05, 0, 0.15}, {0.45, 0, 0.15}, 0.3).has_value());
  }

  TEST_CASE("geodesic around a U wall matches the oracle") {
    std::vector<std::string> rows(100, std::string(100, '.'));
    for (int r = 0; r < 80; ++r) rows[r][50] = '#';
    const OccupancyGrid grid = grid_from_rows(0.1, {0.05, 0, 0.05}, rows);
    const WorldPoint a{4.05, 0, 2.05};
    const WorldPoint b{6.05, 0, 2.05};
    const auto d = geodesic_distance(grid, a, b, 0.5);
    REQUIRE(d.has_value());
    CHECK(*d > ground_distance(a, b));
    const auto oracle = ucs_from(grid, {40, 20});
    const auto& cost = oracle[static_cast<std::size_t>(20) * 100 + 60];
    REQUIRE(cost.has_value());
    CHECK(*d == doctest::Approx(cost->length(0.1)).epsilon(1e-12));
  }

  TEST_CASE("discretization") {
    const OccupancyGrid grid = open_grid(30, 1, 0.1, {0, 0, 0});
    PathPlanner planner(grid);
    const GridPath single{{Cell{4, 0}}, 0.0};
    const auto one = discretize(grid, single, 0.5, 0.8);
    REQUIRE(one.size() == 1);
    CHECK(one[0].position.y == 0.8);
    const auto path = planner.shortest_path({0, 0}, {20, 0});
    const auto wps = discretize(grid, *path, 0.5, 0.8);
    REQUIRE(wps.size() == 5);
    for (std::size_t i = 0; i < wps.size(); ++i) {
      CHECK(wps[i].position.x == doctest::Approx(0.5 * i).epsilon(1e-12));
      CHECK(wps[i].position.z == 0.0);
    }
    CHECK_THROWS_AS(discretize(grid, *path, 0.0, 0.8), ConfigError);
  }

  TEST_CASE("discretization spacing on a bent path") {
    const OccupancyGrid grid = open_grid(40, 40);
    PathPlanner planner(grid);
    const auto path = planner.shortest_path({0, 0}, {35, 12});
    const auto wps = discretize(grid, *path, 0.25, 0.8);
    REQUIRE(wps.size() >= 2);
    for (std::size_t i = 1; i < wps.size(); ++i) {
      CHECK(ground_distance(wps[i - 1].position, wps[i].position) <= 0.25 + 1e-9);
    }
    const WorldPoint end = grid.cell_center(path->cells.back());
    CHECK(ground_distance(wps.back().position, end) < 1e-9);
  }

  TEST_CASE("exploration tour") {
    const OccupancyGrid grid = open_grid(30, 30);
    const Trajectory single = exploration_tour(grid, 1, 5, 0.8);
    CHECK(single.poses.size() == 9);
    for (const Pose& p : single.poses) {
      CHECK(p.position == single.poses[0].position);
    }
    const Trajectory a = exploration_tour(grid, 5, 42, 0.8);
    const Trajectory b = exploration_tour(grid, 5, 42, 0.8);
    REQUIRE(a.poses.size() == b.poses.size());
    for (std::size_t i = 0; i < a.poses.size(); ++i) CHECK(a.poses[i] == b.poses[i]);
    for (std::size_t i = 1; i < a.poses.size(); ++i) {
      const double d = ground_distance(a.poses[i - 1].position, a.poses[i].position);
      CHECK(d <= kRoot2 * 0.1 + 1e-9);
    }
    CHECK_THROWS_AS(exploration_tour(grid, 0, 1, 0.8), ConfigError);
  }
}

TEST_SUITE("tasks") {
  TEST_CASE("stratum boundaries") {
    CHECK(stratum_of(0.0) == Stratum::Short);
    CHECK(stratum_of(5.999) == Stratum::Short);
    CHECK(stratum_of(6.0) == Stratum::Medium);
    CHECK(stratum_of(9.999) == Stratum::Medium);
    CHECK(stratum_of(10.0) == Stratum::Long);
    CHECK(stratum_of(48.0) == Stratum::Long);
    CHECK_THROWS_AS(stratum_of(-0.001), OutOfRangeError);
    CHECK_THROWS_AS(stratum_of(48.001), OutOfRangeError);
    for (Stratum s : {Stratum::Short, Stratum::Medium, Stratum::Long}) {
      CHECK(parse_stratum(to_string(s)) == s);
    }
  }

  TEST_CASE("sampling is deterministic") {
    const SceneAnnotation scene = fixture_scene(1);
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    const NavTask t1 = sample_task(scene, map, 3, TaskConfig{});
    const NavTask t2 = sample_task(scene, map, 3, TaskConfig{});
    CHECK(serialize_task(t1) == serialize_task(t2));
    CHECK(t1.query.s_src != t1.query.s_tgt);
  }

  TEST_CASE("sampled tasks satisfy the stratum invariants") {
    const SceneAnnotation scene = fixture_scene(1);
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    const TaskConfig cfg;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const NavTask task = sample_task(scene, map, seed, cfg);
      REQUIRE(!task.gt_path.cells.empty());
      CHECK(task.gt_path.length_m >= 0.0);
      CHECK(task.gt_path.length_m <= cfg.max_length);
      CHECK(task.stratum == stratum_of(task.gt_path.length_m));
      // The stored length equals the exact step-count length of the cells.
      StepCost steps{0, 0};
      for (std::size_t i = 1; i < task.gt_path.cells.size(); ++i) {
        const Cell p = task.gt_path.cells[i - 1];
        const Cell q = task.gt_path.cells[i];
        if (p.col != q.col && p.row != q.row) {
          ++steps.diagonal;
        } else {
          ++steps.axial;
        }
      }
      CHECK(task.gt_path.length_m ==
            doctest::Approx(steps.length(scene.grid.resolution())).epsilon(1e-12));
      REQUIRE(!task.gt_chain.steps.empty());
      const WorldPoint end = scene.grid.cell_center(task.gt_path.cells.back());
      CHECK(ground_distance(task.gt_chain.goal, end) < 1e-9);
    }
  }

  TEST_CASE("disconnected entities exhaust sampling") {
    std::vector<std::string> rows(100, std::string(100, '.'));
    for (int r = 0; r < 100; ++r) rows[r][50] = '#';
    SceneAnnotation scene;
    scene.scene_id = "split";
    scene.objects = {make_object("a", "sofa", 1, 2, 0, 1, 1, 2),
                     make_object("b", "bed", 7, 8, 0, 1, 7, 8)};
    scene.grid = grid_from_rows(0.1, {0.05, 0, 0.05}, rows);
    scene.floorplan = {50.0, 0.0, 0.0, 500, 500};
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    REQUIRE(map.landmarks.size() == 2);
    CHECK_THROWS_AS(sample_task(scene, map, 1, TaskConfig{}), ExhaustedSamplingError);
  }

  TEST_CASE("chain construction preconditions") {
    const CorridorFixture fx;
    CHECK_THROWS_AS(build_reasoning_chain(fx.grid, GridPath{}, fx.map, ChainConfig{}), ConfigError);
    CHECK_THROWS_AS(build_reasoning_chain(fx.grid, fx.path, CognitiveMap{}, ChainConfig{}),
                    EmptySelectionError);
  }

  TEST_CASE("single landmark collapses to the terminal step") {
    const OccupancyGrid grid = open_grid(25, 11);
    PathPlanner planner(grid);
    const auto path = planner.shortest_path({2, 5}, {22, 5});
    CognitiveMap map;
    map.landmarks = {make_landmark("L", "sofa", 1.0, 0.8)};
    const PlanChain chain = build_reasoning_chain(grid, *path, map, ChainConfig{});
    REQUIRE(chain.steps.size() == 1);
    CHECK(chain.steps[0].lm == "L");
    CHECK(chain.has_goal);
    CHECK(ground_distance(chain.goal, grid.cell_center({22, 5})) < 1e-9);
  }

  TEST_CASE("long route emits a cue inside the landmark-free stretch") {
    const CorridorFixture fx;
    CHECK(fx.path.length_m == doctest::Approx(14.0).epsilon(1e-12));
    const PlanChain chain = build_reasoning_chain(fx.grid, fx.path, fx.map, ChainConfig{});
    REQUIRE(chain.steps.size() == 4);
    CHECK(chain.steps[0].lm == "L1");
    CHECK(chain.steps[1].lm == "L2");
    CHECK(chain.steps[2].lm == "L4");  // never corridor-hit: synthetic cue
    CHECK(chain.steps[3].lm == "L3");
    const DecodedChain dec = decode_chain(fx.map, chain);
    const ExecutionResult ex = execute_plan(fx.grid, fx.path.cells.front(),
                                            dec.execution_waypoints());
    CHECK(ex.executable);
    CHECK(ground_distance(ex.final_position, chain.goal) <= 1.0);
    CHECK(ex.traveled_m <= fx.path.length_m * 1.15);
  }

  TEST_CASE("task serialization round-trip") {
    const SceneAnnotation scene = fixture_scene(1);
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    const NavTask task = sample_task(scene, map, 5, TaskConfig{});
    const std::string text = serialize_task(task);
    const NavTask back = parse_task(text);
    CHECK(back.task_id == task.task_id);
    CHECK(back.scene_id == task.scene_id);
    CHECK(back.query == task.query);
    CHECK(back.stratum == task.stratum);
    CHECK(back.gt_path.cells.empty());
    // The stored length is printed with six significant digits.
    CHECK(back.gt_path.length_m == doctest::Approx(task.gt_path.length_m).epsilon(5e-6));
    CHECK(back.gt_chain.steps.size() == task.gt_chain.steps.size());
    CHECK(serialize_task(back) == text);
  }

  TEST_CASE("stored stratum must match the stored length") {
    const SceneAnnotation scene = fixture_scene(1);
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    const NavTask task = sample_task(scene, map, 5, TaskConfig{});
    nlohmann::json doc = nlohmann::json::parse(serialize_task(task));
    doc["gt_path_length_m"] = 47.0;
    doc["stratum"] = "short";
    CHECK_THROWS_AS(parse_task(doc.dump()), SchemaError);
  }
}

TEST_SUITE("codec") {
  TEST_CASE("reference output round-trips cleanly") {
    const CorridorFixture fx;
    const PlanChain chain = build_reasoning_chain(fx.grid, fx.path, fx.map, ChainConfig{});
    const std::string doc = serialize_reference_output(fx.map, chain);
    const ModelOutput out = parse_model_output(doc);
    CHECK(out.issues.empty());
    REQUIRE(out.map.has_value());
    REQUIRE(out.chain.has_value());
    CHECK(out.map->landmarks.size() == fx.map.landmarks.size());
    REQUIRE(out.chain->steps.size() == chain.steps.size());
    for (std::size_t i = 0; i < chain.steps.size(); ++i) {
      CHECK(out.chain->steps[i].lm == chain.steps[i].lm);
      CHECK(out.chain->steps[i].rel.dir == chain.steps[i].rel.dir);
      CHECK(out.chain->steps[i].rel.dist ==
            doctest::Approx(chain.steps[i].rel.dist).epsilon(1e-5));
    }
    CHECK(ground_distance(out.chain->goal, chain.goal) < 1e-5);
    // Strict mode accepts the same canonical document.
    const ModelOutput strict = parse_model_output(doc, true);
    CHECK(strict.issues.empty());
    CHECK(strict.map.has_value());
  }

  TEST_CASE("fenced block parses like the bare document") {
    const CorridorFixture fx;
    const PlanChain chain = build_reasoning_chain(fx.grid, fx.path, fx.map, ChainConfig{});
    const std::string doc = serialize_reference_output(fx.map, chain);
    const std::string prose =
        "Here is my plan.\n```json\n" + doc + "\n```\nGood luck out there!";
    const ModelOutput bare = parse_model_output(doc);
    const ModelOutput fenced = parse_model_output(prose);
    REQUIRE(fenced.map.has_value());
    REQUIRE(fenced.chain.has_value());
    CHECK(*fenced.map == *bare.map);
    CHECK(fenced.chain->steps.size() == bare.chain->steps.size());
    // Strict mode refuses extraction from prose.
    const ModelOutput strict = parse_model_output(prose, true);
    CHECK(strict.has_errors());
    CHECK_FALSE(strict.map.has_value());
  }

  TEST_CASE("a broken chain leaves the map intact") {
    const CorridorFixture fx;
    const PlanChain chain = build_reasoning_chain(fx.grid, fx.path, fx.map, ChainConfig{});
    nlohmann::json doc =
        nlohmann::json::parse(serialize_reference_output(fx.map, chain));
    doc["chain"]["steps"][0].erase("dist");
    const ModelOutput out = parse_model_output(doc.dump());
    CHECK(out.map.has_value());
    CHECK_FALSE(out.chain.has_value());
    REQUIRE(!out.issues.empty());
    bool found = false;
    for (const ParseIssue& issue : out.issues) {
      if (issue.path.find("steps[0]") != std::string::npos &&
          issue.path.find("dist") != std::string::npos) {
        found = true;
      }
    }
    CHECK(found);
  }

  TEST_CASE("semantic labels are normalized") {
    const std::string doc = R"({"chain": {"goal": [1.0, 2.0], "steps": [
      {"lm": "L1", "sem": "  Coffee   Table ", "dir": "N", "h": "same", "dist": 1.0,
       "bbox": [0, 1, 0, 1]}]}})";
    const ModelOutput out = parse_model_output(doc);
    REQUIRE(out.chain.has_value());
    CHECK(out.chain->steps[0].sem == "coffee table");
  }

  TEST_CASE("garbage text never throws") {
    CHECK_FALSE(parse_model_output("").map.has_value());
    CHECK(parse_model_output("").has_errors());
    CHECK(parse_model_output("{\"map\": [1,2,").has_errors());
    CHECK(parse_model_output("no json here at all").has_errors());
  }

  TEST_CASE("step decoding on the axes") {
    CognitiveMap map;
    map.landmarks = {make_landmark("L", "sofa", 2.0, 3.0, 0.5)};
    const Waypoint north = decode_step(map, {"L", "sofa", {DirBin::N, VerticalRel::Same, 1.0}, {}});
    CHECK(north.position.x == 2.0);
    CHECK(north.position.z == 4.0);
    const Waypoint diag =
        decode_step(map, {"L", "sofa", {DirBin::NE, VerticalRel::Same, kRoot2}, {}});
    CHECK(diag.position.x == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(diag.position.z == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("landmark references resolve by id then unique semantic") {
    CognitiveMap map;
    map.landmarks = {make_landmark("L1", "sofa", 1.0, 1.0), make_landmark("L2", "bed", 5.0, 5.0),
                     make_landmark("L3", "bed", 8.0, 2.0)};
    const Waypoint by_sem = decode_step(map, {"nope", "sofa", {DirBin::E, VerticalRel::Same, 1.0}, {}});
    CHECK(by_sem.position.x == 2.0);
    CHECK_THROWS_AS(decode_step(map, {"nope", "bed", {DirBin::E, VerticalRel::Same, 1.0}, {}}),
                    AmbiguousSemanticError);
    CHECK_THROWS_AS(decode_step(map, {"nope", "piano", {DirBin::E, VerticalRel::Same, 1.0}, {}}),
                    UnknownLandmarkError);
  }

  TEST_CASE("decoding inverts encoding") {
    CognitiveMap map;
    map.landmarks = {make_landmark("L", "sofa", 4.0, 4.0)};
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
      const DirBin dir = static_cast<DirBin>(rng.index(8));
      const double dist = rng.real(0.25, 6.0);
      const Waypoint wp = decode_step(map, {"L", "sofa", {dir, VerticalRel::Same, dist}, {}});
      const double dx = wp.position.x - 4.0;
      const double dz = wp.position.z - 4.0;
      CHECK(bearing_bin(dx, dz) == dir);
      CHECK(std::hypot(dx, dz) == doctest::Approx(dist).epsilon(1e-12));
    }
  }

  TEST_CASE("partially resolvable chains") {
    CognitiveMap map;
    map.landmarks = {make_landmark("L1", "sofa", 1.0, 1.0)};
    PlanChain chain;
    chain.steps = {{"L1", "sofa", {DirBin::N, VerticalRel::Same, 0.5}, {}},
                   {"LX", "bed", {DirBin::N, VerticalRel::Same, 0.5}, {}},
                   {"LY", "desk", {DirBin::N, VerticalRel::Same, 0.5}, {}}};
    chain.goal = {1.0, 0, 1.5};
    const DecodedChain dec = decode_chain(map, chain);
    CHECK(dec.waypoints.size() == 1);
    CHECK(dec.issues.size() == 2);
    PlanChain hopeless;
    hopeless.steps = {{"LX", "bed", {DirBin::N, VerticalRel::Same, 0.5}, {}}};
    CHECK_THROWS_AS(decode_chain(map, hopeless), EmptyDecodedChainError);
  }

  TEST_CASE("declared goal replaces the terminal waypoint") {
    CognitiveMap map;
    map.landmarks = {make_landmark("L1", "sofa", 1.0, 1.0)};
    PlanChain chain;
    chain.steps = {{"L1", "sofa", {DirBin::N, VerticalRel::Same, 0.5}, {}}};
    chain.goal = {9.0, 0, 9.0};
    chain.has_goal = true;
    const DecodedChain dec = decode_chain(map, chain);
    CHECK(dec.p_hat == WorldPoint{9.0, 0, 9.0});
    const auto exec = dec.execution_waypoints(0.8);
    REQUIRE(exec.size() == 1);
    CHECK(exec.back().position == WorldPoint{9.0, 0.8, 9.0});
    chain.has_goal = false;
    const DecodedChain no_goal = decode_chain(map, chain);
    CHECK(no_goal.p_hat.z == doctest::Approx(1.5));
  }

  TEST_CASE("issue report serialization") {
    const ModelOutput out = parse_model_output("just words");
    const nlohmann::json doc = nlohmann::json::parse(serialize_model_output(out));
    CHECK(doc["map_present"] == false);
    CHECK(doc["chain_present"] == false);
    CHECK(doc["issues"].is_array());
    CHECK(!doc["issues"].empty());
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("matching and mean overlap") {
    CognitiveMap gt;
    gt.landmarks = {make_landmark("g1", "sofa", 1, 1), make_landmark("g2", "bed", 5, 5)};
    CHECK(landmark_miou(gt, gt) == 1.0);
    CHECK(landmark_miou(CognitiveMap{}, gt) == 0.0);

    // One predicted sofa overlapping two true sofas at 0.6 and ~0.14:
    // the greedy match takes the larger, the unmatched one scores zero.
    CognitiveMap two_sofas;
    two_sofas.landmarks = {{"a", "sofa", {0, 1, 0, 1}, "a"}, {"b", "sofa", {1.0, 2.0, 0, 1}, "b"}};
    CognitiveMap pred;
    pred.landmarks = {{"p", "sofa", {0.25, 1.25, 0, 1}, "p"}};
    const auto pairs = greedy_landmark_matching(pred, two_sofas);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].gt_index == 0);
    CHECK(pairs[0].iou == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(landmark_miou(pred, two_sofas) == doctest::Approx(0.3).epsilon(1e-12));
  }

  TEST_CASE("detection scores") {
    CognitiveMap gt;
    gt.landmarks = {make_landmark("g1", "sofa", 1, 1), make_landmark("g2", "bed", 5, 5)};
    const PrecisionRecall perfect = landmark_f1(gt, gt, 0.25);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);

    CognitiveMap padded = gt;
    padded.landmarks.push_back(make_landmark("x", "piano", 8, 8));
    const PrecisionRecall extra = landmark_f1(padded, gt, 0.25);
    CHECK(extra.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(extra.recall == 1.0);
    CHECK(extra.f1 == doctest::Approx(0.8).epsilon(1e-12));

    CognitiveMap renamed = gt;
    for (auto& lm : renamed.landmarks) lm.semantic = "crate";
    const PrecisionRecall wrong = landmark_f1(renamed, gt, 0.25);
    CHECK(wrong.precision == 0.0);
    CHECK(wrong.recall == 0.0);
    CHECK(wrong.f1 == 0.0);
  }

  TEST_CASE("navigation error") {
    CHECK(navigation_error({1, 0, 2}, {1, 5, 2}) == 0.0);
    CHECK(navigation_error({0, 0, 0}, {3, 0, 4}) == 5.0);
    Rng rng(31);
    for (int i = 0; i < 100; ++i) {
      const WorldPoint a{rng.real(-9, 9), 0, rng.real(-9, 9)};
      const WorldPoint b{rng.real(-9, 9), 0, rng.real(-9, 9)};
      CHECK(navigation_error(a, b) == navigation_error(b, a));
    }
  }

  TEST_CASE("terminal waypoint error ignores the declared goal") {
    const WorldPoint target{2, 0, 2};
    CHECK(ne_waypoint({Waypoint{{2, 0.8, 2}}}, target) == 0.0);
    CHECK_THROWS_AS(ne_waypoint({}, target), EmptyDecodedChainError);
    CognitiveMap map;
    map.landmarks = {make_landmark("L", "sofa", 2.0, 1.0)};
    PlanChain chain;
    chain.steps = {{"L", "sofa", {DirBin::N, VerticalRel::Same, 1.0}, {}}};
    chain.goal = {7, 0, 7};
    const DecodedChain dec = decode_chain(map, chain);
    CHECK(ne_waypoint(dec.waypoints, target) == 0.0);
    CHECK(navigation_error(dec.p_hat, target) > 5.0);
  }

  TEST_CASE("plan execution") {
    const OccupancyGrid grid = open_grid(30, 30);
    const Cell start{5, 5};
    const auto stay = execute_plan(grid, start, {Waypoint{grid.cell_center(start)}});
    CHECK(stay.executable);
    CHECK(stay.traveled_m == 0.0);
    CHECK_FALSE(stay.failed_leg.has_value());

    std::vector<std::string> rows(30, std::string(30, '.'));
    for (int r = 9; r <= 21; ++r)
      for (int c = 9; c <= 21; ++c) rows[r][c] = '#';
    const OccupancyGrid walled = grid_from_rows(0.1, {0, 0, 0}, rows);
    const auto blocked =
        execute_plan(walled, {0, 0}, {Waypoint{{0.5, 0, 0.5}}, Waypoint{{1.5, 0, 1.5}}});
    CHECK_FALSE(blocked.executable);
    REQUIRE(blocked.failed_leg.has_value());
    CHECK(*blocked.failed_leg == 1);
  }

  TEST_CASE("path efficiency weighting") {
    CHECK(spl(true, 10.0, 20.0) == 0.5);
    CHECK(spl(false, 10.0, 20.0) == 0.0);
    CHECK(spl(true, 7.5, 7.5) == 1.0);
    CHECK(spl(true, 0.0, 0.0) == 1.0);
  }

  TEST_CASE("aggregation") {
    InstanceReport solo;
    solo.task_id = "t";
    solo.stratum = Stratum::Medium;
    solo.ne = 2.0;
    solo.ne_wp = 1.0;
    solo.sr_t = true;
    solo.sr_p = false;
    solo.spl = 0.25;
    const BenchmarkReport single = aggregate({solo});
    CHECK(single.overall.count == 1);
    CHECK(single.overall.ne_mean == 2.0);
    CHECK(single.overall.sr_t == 1.0);
    CHECK(single.overall.sr_p == 0.0);
    CHECK(single.stats(Stratum::Medium).count == 1);
    CHECK(single.stats(Stratum::Short).count == 0);

    // Overall means weight instances, not strata.
    std::vector<InstanceReport> mixed;
    for (int i = 0; i < 4; ++i) {
      InstanceReport r;
      r.task_id = "t" + std::to_string(i);
      r.stratum = i == 0 ? Stratum::Short : Stratum::Long;
      r.ne = i == 0 ? 4.0 : 1.0;
      r.sr_p = i != 0;
      r.spl = i != 0 ? 1.0 : 0.0;
      mixed.push_back(r);
    }
    const BenchmarkReport rep = aggregate(mixed);
    CHECK(rep.overall.ne_mean == doctest::Approx((4.0 + 3.0) / 4.0).epsilon(1e-12));
    CHECK(rep.overall.sr_p == 0.75);
    CHECK(rep.overall.spl == 0.75);

    Rng rng(9);
    std::vector<InstanceReport> many;
    double ne_sum = 0.0;
    std::size_t scored = 0;
    std::size_t successes = 0;
    for (int i = 0; i < 100; ++i) {
      InstanceReport r;
      r.task_id = "s" + std::to_string(i);
      r.stratum = static_cast<Stratum>(rng.index(3));
      r.unscored = rng.index(5) == 0;
      if (!r.unscored) {
        r.ne = rng.real(0.0, 8.0);
        ne_sum += *r.ne;
        ++scored;
        r.sr_p = *r.ne < 4.0;
      }
      successes += r.sr_p ? 1 : 0;
      many.push_back(r);
    }
    const BenchmarkReport big = aggregate(many);
    CHECK(big.overall.count == 100);
    CHECK(big.overall.scored == scored);
    CHECK(*big.overall.ne_mean == doctest::Approx(ne_sum / scored).epsilon(1e-12));
    CHECK(big.overall.sr_p == doctest::Approx(successes / 100.0).epsilon(1e-12));
    CHECK(big.unscored_rate == doctest::Approx((100.0 - scored) / 100.0).epsilon(1e-12));
  }

  TEST_CASE("scoring a faithful reply") {
    const SceneAnnotation scene = fixture_scene(1);
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    const NavTask task = sample_task(scene, map, 8, TaskConfig{});
    EvalContext ctx;
    ctx.scene = &scene;
    ctx.gt_map = &map;
    const ModelOutput good =
        parse_model_output(serialize_reference_output(map, task.gt_chain));
    const InstanceReport report = evaluate_instance(task, good, ctx);
    CHECK_FALSE(report.unscored);
    CHECK(report.sr_t);
    CHECK(report.sr_p);
    CHECK(report.spl >= 0.85);
    CHECK(report.miou == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.f1 == 1.0);
    REQUIRE(report.ne.has_value());
    CHECK(*report.ne < 1e-6);
  }

  TEST_CASE("scoring an empty reply") {
    const SceneAnnotation scene = fixture_scene(1);
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    const NavTask task = sample_task(scene, map, 8, TaskConfig{});
    EvalContext ctx;
    ctx.scene = &scene;
    ctx.gt_map = &map;
    const InstanceReport report = evaluate_instance(task, parse_model_output(""), ctx);
    CHECK(report.unscored);
    CHECK_FALSE(report.sr_t);
    CHECK_FALSE(report.sr_p);
    CHECK(report.spl == 0.0);
    CHECK_FALSE(report.ne.has_value());
    CHECK(report.issues >= 1);
  }

  TEST_CASE("goal and execution succeed or fail independently") {
    const SceneAnnotation scene = fixture_scene(1);
    const CognitiveMap map = build_cognitive_map(scene, MapConfig{}, 0);
    const NavTask task = sample_task(scene, map, 8, TaskConfig{});
    PlanChain broken = task.gt_chain;
    // Send a leg far outside the mapped extent: correct goal, impossible walk.
    broken.steps.front().rel.dist = 500.0;
    EvalContext ctx;
    ctx.scene = &scene;
    ctx.gt_map = &map;
    const ModelOutput out = parse_model_output(serialize_reference_output(map, broken));
    REQUIRE(out.chain.has_value());
    const InstanceReport report = evaluate_instance(task, out, ctx);
    CHECK(report.sr_t);
    CHECK_FALSE(report.sr_p);
    CHECK(report.spl == 0.0);
  }
}

TEST_SUITE("perplexity") {
  TEST_CASE("span perplexity closed forms") {
    TokenLogProbRecord rec;
    rec.sample_id = "r";
    const double half = std::log(0.5);
    rec.tokens = {{"a", half}, {"b", half}};
    rec.critical_spans = {{0, 2}};
    CHECK(span_perplexity(rec) == 2.0);
    rec.tokens = {{"a", 0.0}, {"b", 0.0}};
    CHECK(span_perplexity(rec) == 1.0);
    rec.tokens = {{"a", std::log(0.5)}, {"b", std::log(0.25)}};
    CHECK(span_perplexity(rec) == doctest::Approx(2.0 * kRoot2).epsilon(1e-12));
  }

  TEST_CASE("record validation") {
    TokenLogProbRecord rec;
    rec.sample_id = "r";
    rec.tokens = {{"a", -1.0}, {"b", -1.0}, {"c", -1.0}};
    rec.critical_spans = {};
    CHECK_THROWS_AS(validate(rec), EmptySpansError);
    rec.critical_spans = {{2, 2}};
    CHECK_THROWS_AS(validate(rec), SchemaError);
    rec.critical_spans = {{1, 4}};
    CHECK_THROWS_AS(validate(rec), SchemaError);
    rec.critical_spans = {{1, 3}, {0, 1}};
    CHECK_THROWS_AS(validate(rec), SchemaError);
    rec.critical_spans = {{0, 2}, {1, 3}};
    CHECK_THROWS_AS(validate(rec), SchemaError);
    rec.critical_spans = {{0, 1}, {2, 3}};
    CHECK_NOTHROW(validate(rec));
    rec.tokens[1].logprob = 0.5;
    CHECK_THROWS_AS(validate(rec), SchemaError);
  }

  TEST_CASE("band filtering") {
    auto make_rec = [](const std::string& id, double ppl) {
      TokenLogProbRecord rec;
      rec.sample_id = id;
      rec.tokens = {{"w", -std::log(ppl)}};
      rec.critical_spans = {{0, 1}};
      return rec;
    };
    const std::vector<TokenLogProbRecord> recs = {make_rec("a", 1.5), make_rec("b", 2.0),
                                                  make_rec("c", 9.0)};
    const FilterOutcome out = filter_band(recs, {1.8, 5.0});
    REQUIRE(out.kept.size() == 1);
    CHECK(out.kept[0].sample_id == "b");
    CHECK(out.kept[0].ppl == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(out.below == 1);
    CHECK(out.above == 1);
    const FilterOutcome all = filter_band(recs, {1e-9, 1e9});
    CHECK(all.kept.size() == 3);
    CHECK(all.below + all.above == 0);
    CHECK(std::is_sorted(all.kept.begin(), all.kept.end(),
                         [](const KeptSample& x, const KeptSample& y) {
                           return x.sample_id < y.sample_id;
                         }));
  }

  TEST_CASE("percentile band") {
    const PerplexityBand band = percentile_band({10, 1, 9, 2, 8, 3, 7, 4, 6, 5});
    CHECK(band.tau_min == 4.0);
    CHECK(band.tau_max == 9.0);
    CHECK_THROWS_AS(percentile_band({}), ConfigError);
    CHECK_THROWS_AS(percentile_band({2.0, 2.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(validate(PerplexityBand{0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate(PerplexityBand{3.0, 2.0}), ConfigError);
    CHECK_NOTHROW(validate(PerplexityBand{1.8, 5.0}));
  }

  TEST_CASE("span marking finds schema keys") {
    const std::vector<TokenLogProb> tokens = {{"{\"", -.1}, {"lm", -.1},   {"\": \"", -.1},
                                              {"o1", -.1},  {"\", \"", -.1}, {"dist", -.1},
                                              {"\": 2}", -.1}};
    const auto spans = mark_critical_spans(tokens);
    REQUIRE(!spans.empty());
    std::set<std::size_t> covered;
    for (const TokenSpan& s : spans)
      for (std::size_t i = s.start; i < s.end; ++i) covered.insert(i);
    CHECK(covered.count(1) == 1);
    CHECK(covered.count(5) == 1);
    CHECK(mark_critical_spans({{"plain", -.1}, {"words", -.1}}).empty());
  }

  TEST_CASE("record lines") {
    const TokenLogProbRecord rec = parse_record_line(record_line("s1", {-0.5, -0.25}, {{0, 2}}));
    CHECK(rec.sample_id == "s1");
    CHECK(rec.tokens.size() == 2);
    CHECK(rec.critical_spans.size() == 1);
    CHECK_THROWS_AS(parse_record_line("{not json"), SchemaError);
    CHECK_THROWS_AS(parse_record_line(R"({"sample_id": "x", "tokens": [], "critical_spans": [],
                                         "extra": 1})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_record_line(R"({"sample_id": "x", "tokens": 3, "critical_spans": []})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_record_line(R"({"tokens": [], "critical_spans": []})"), SchemaError);
  }
}

TEST_SUITE("config") {
  TEST_CASE("empty document means defaults") {
    const RunConfig defaults;
    const RunConfig parsed = parse_config("{}");
    CHECK(parsed.exclusion == defaults.exclusion);
    CHECK(parsed.max_landmarks == defaults.max_landmarks);
    CHECK(parsed.r0 == defaults.r0);
    CHECK(parsed.growth == defaults.growth);
    CHECK(parsed.step == defaults.step);
    CHECK(parsed.corridor == defaults.corridor);
    CHECK(parsed.max_length == defaults.max_length);
    CHECK_FALSE(parsed.band.has_value());
  }

  TEST_CASE("serialization round-trip") {
    RunConfig cfg;
    cfg.max_landmarks = 9;
    cfg.k = 3;
    cfg.band = PerplexityBand{1.5, 4.5};
    const RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back.max_landmarks == 9);
    CHECK(back.k == 3);
    REQUIRE(back.band.has_value());
    CHECK(back.band->tau_min == 1.5);
    CHECK(back.band->tau_max == 4.5);
    CHECK(serialize_config(back) == serialize_config(cfg));
  }

  TEST_CASE("unknown keys and bad values are named") {
    try {
      parse_config(R"({"corridoor": 2.0})");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.path().find("corridoor") != std::string::npos);
    }
    try {
      parse_config(R"({"growth": 1.0})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.path() == "growth");
    }
    CHECK_THROWS_AS(parse_config(R"({"max_landmarks": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"iou_thresh": 1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"band": {"tau_min": 5.0, "tau_max": 2.0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), SchemaError);
    CHECK_THROWS_AS(parse_config("{"), SchemaError);
  }

  TEST_CASE("module views carry the shared fields") {
    RunConfig cfg;
    cfg.max_landmarks = 4;
    cfg.k = 2;
    cfg.corridor = 2.5;
    cfg.snap_radius = 0.75;
    cfg.iou_thresh = 0.5;
    const MapConfig mc = to_map_config(cfg);
    CHECK(mc.max_landmarks == 4);
    CHECK(mc.k == 2);
    const ChainConfig cc = to_chain_config(cfg);
    CHECK(cc.corridor == 2.5);
    const TaskConfig tc = to_task_config(cfg);
    CHECK(tc.snap_radius == 0.75);
    CHECK(tc.chain.corridor == 2.5);
    const EvalParams ep = to_eval_params(cfg);
    CHECK(ep.iou_thresh == 0.5);
    CHECK(ep.snap_radius == 0.75);
  }
}

TEST_SUITE("commands") {
  TEST_CASE("map building is deterministic on disk") {
    TempDir tmp;
    const std::string scene_path =
        (fs::path(COGNAV_DATA_DIR) / "scenes" / "synthetic_apartment_01.json").string();
    std::string err;
    CHECK(run_build_map(scene_path, tmp.str("map.json"), &err) == 0);
    CHECK(err.empty());
    const std::string first = read_file(tmp.str("map.json"));
    CHECK_NOTHROW(parse_map(first));
    CHECK(run_build_map(scene_path, tmp.str("map2.json")) == 0);
    CHECK(read_file(tmp.str("map2.json")) == first);
  }

  TEST_CASE("map building reports bad input") {
    TempDir tmp;
    std::string doc = minimal_scene_json();
    const auto pos = doc.find("[1.0, 2.0]");
    doc.replace(pos, 10, "[2.0, 1.0]");
    write_file(tmp.path / "bad.json", doc);
    std::string err;
    CHECK(run_build_map(tmp.str("bad.json"), tmp.str("map.json"), &err) == 1);
    CHECK(err.find("t01") != std::string::npos);
    CHECK(run_build_map(tmp.str("missing.json"), tmp.str("map.json"), &err) == 2);
  }

  TEST_CASE("task generation writes a consistent manifest") {
    TempDir tmp;
    const std::string scene_path =
        (fs::path(COGNAV_DATA_DIR) / "scenes" / "synthetic_apartment_01.json").string();
    REQUIRE(run_build_map(scene_path, tmp.str("map.json")) == 0);
    std::ostringstream out;
    std::ostringstream err;
    const int rc =
        cmd_gen_tasks(scene_path, tmp.str("map.json"), "", 5, 100, tmp.str("tasks"), {out, err});
    REQUIRE(rc == 0);
    const nlohmann::json manifest =
        nlohmann::json::parse(read_file(tmp.path / "tasks" / "manifest.json"));
    CHECK(manifest["count"] == 5);
    std::size_t strata_counts[3] = {0, 0, 0};
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(tmp.path / "tasks")) {
      if (entry.path().filename() == "manifest.json") continue;
      ++files;
      const NavTask task = parse_task(read_file(entry.path()));
      ++strata_counts[static_cast<int>(task.stratum)];
    }
    CHECK(files == 5);
    CHECK(manifest["strata"]["short"] == strata_counts[0]);
    CHECK(manifest["strata"]["medium"] == strata_counts[1]);
    CHECK(manifest["strata"]["long"] == strata_counts[2]);
    CHECK(manifest["task_ids"].size() == 5);
  }

  TEST_CASE("scoring ground-truth replies") {
    TempDir tmp;
    const std::string scene_path =
        (fs::path(COGNAV_DATA_DIR) / "scenes" / "synthetic_apartment_01.json").string();
    std::ostringstream out;
    std::ostringstream err;
    // The scorer rebuilds the reference map with seed 0.
    REQUIRE(cmd_build_map(scene_path, "", 0, tmp.str("map.json"), {out, err}) == 0);
    REQUIRE(cmd_gen_tasks(scene_path, tmp.str("map.json"), "", 6, 50, tmp.str("tasks"),
                          {out, err}) == 0);
    const CognitiveMap map = parse_map(read_file(tmp.str("map.json")));
    std::ostringstream lines;
    for (const auto& entry : fs::directory_iterator(tmp.path / "tasks")) {
      if (entry.path().filename() == "manifest.json") continue;
      const NavTask task = parse_task(read_file(entry.path()));
      nlohmann::json line;
      line["task_id"] = task.task_id;
      line["model_text"] = serialize_reference_output(map, task.gt_chain);
      lines << line.dump() << "\n";
    }
    write_file(tmp.path / "outputs.jsonl", lines.str());
    const int rc = cmd_eval(tmp.str("tasks"), tmp.str("outputs.jsonl"), scene_path, "", false,
                            tmp.str("report.json"), {out, err});
    REQUIRE(rc == 0);
    const nlohmann::json report = nlohmann::json::parse(read_file(tmp.str("report.json")));
    CHECK(report["aggregate"]["overall"]["sr_p"].get<double>() >= 0.95);
    CHECK(report["aggregate"]["unscored_rate"].get<double>() == 0.0);
    CHECK(report["instances"].size() == 6);
  }

  TEST_CASE("scoring sparse and damaged replies") {
    TempDir tmp;
    const std::string scene_path =
        (fs::path(COGNAV_DATA_DIR) / "scenes" / "synthetic_apartment_01.json").string();
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_build_map(scene_path, "", 0, tmp.str("map.json"), {out, err}) == 0);
    REQUIRE(cmd_gen_tasks(scene_path, tmp.str("map.json"), "", 4, 50, tmp.str("tasks"),
                          {out, err}) == 0);

    write_file(tmp.path / "empty.jsonl", "");
    REQUIRE(cmd_eval(tmp.str("tasks"), tmp.str("empty.jsonl"), scene_path, "", false,
                     tmp.str("r1.json"), {out, err}) == 0);
    const nlohmann::json empty_report = nlohmann::json::parse(read_file(tmp.str("r1.json")));
    CHECK(empty_report["aggregate"]["unscored_rate"].get<double>() == 1.0);
    CHECK(empty_report["aggregate"]["overall"]["sr_p"].get<double>() == 0.0);

    const CognitiveMap map = parse_map(read_file(tmp.str("map.json")));
    std::vector<NavTask> tasks;
    for (const auto& entry : fs::directory_iterator(tmp.path / "tasks")) {
      if (entry.path().filename() != "manifest.json") {
        tasks.push_back(parse_task(read_file(entry.path())));
      }
    }
    REQUIRE(tasks.size() == 4);
    std::ostringstream lines;
    for (int i = 0; i < 2; ++i) {
      nlohmann::json line;
      line["task_id"] = tasks[i].task_id;
      line["model_text"] = serialize_reference_output(map, tasks[i].gt_chain);
      lines << line.dump() << "\n";
    }
    lines << "{broken json\n";
    lines << R"({"task_id": "no_such_task", "model_text": "{}"})" << "\n";
    write_file(tmp.path / "mixed.jsonl", lines.str());
    std::ostringstream err2;
    REQUIRE(cmd_eval(tmp.str("tasks"), tmp.str("mixed.jsonl"), scene_path, "", false,
                     tmp.str("r2.json"), {out, err2}) == 0);
    const nlohmann::json mixed_report = nlohmann::json::parse(read_file(tmp.str("r2.json")));
    CHECK(mixed_report["instances"].size() == 4);
    CHECK(mixed_report["aggregate"]["unscored_rate"].get<double>() == 0.5);
    CHECK(err2.str().find("unknown task_id") != std::string::npos);
  }

  TEST_CASE("perplexity filtering command") {
    TempDir tmp;
    std::ostringstream lines;
    lines << record_line("a", {-std::log(1.5)}, {{0, 1}}) << "\n";
    lines << record_line("b", {-std::log(2.0)}, {{0, 1}}) << "\n";
    lines << record_line("c", {-std::log(9.0)}, {{0, 1}}) << "\n";
    write_file(tmp.path / "records.jsonl", lines.str());
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cmd_cogrs(tmp.str("records.jsonl"), PerplexityBand{1.8, 5.0}, tmp.str("kept.json"),
                      {out, err}) == 0);
    CHECK(read_file(tmp.str("kept.json.ids")) == "b\n");
    const nlohmann::json summary = nlohmann::json::parse(read_file(tmp.str("kept.json")));
    CHECK(summary["kept"].size() == 1);

    // Auto band: nearest-rank percentiles of the corpus perplexities.
    std::ostringstream many;
    for (int i = 1; i <= 10; ++i)
      many << record_line("r" + std::to_string(i), {-std::log(static_cast<double>(i))}, {{0, 1}})
           << "\n";
    many << "{oops\n";
    write_file(tmp.path / "many.jsonl", many.str());
    std::ostringstream err2;
    REQUIRE(cmd_cogrs(tmp.str("many.jsonl"), std::nullopt, tmp.str("auto.json"), {out, err2}) == 0);
    const nlohmann::json auto_summary = nlohmann::json::parse(read_file(tmp.str("auto.json")));
    CHECK(auto_summary["band"]["tau_min"].get<double>() == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(auto_summary["band"]["tau_max"].get<double>() == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(err2.str().find("line 11") != std::string::npos);
  }
}
