#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "cognav/codec.hpp"
#include "cognav/cogmap.hpp"
#include "cognav/planner.hpp"
#include "cognav/spectral.hpp"
#include "cognav/synth.hpp"
#include "cognav/tasks.hpp"

namespace {

void BM_ShortestPathApartment(benchmark::State& state) {
  const cognav::SceneAnnotation scene = cognav::fixture_scene(1);
  cognav::PathPlanner planner(scene.grid);
  const cognav::Cell a = *cognav::snap_to_navigable(scene.grid, {0.5, 0.0, 0.5}, 0.5);
  const cognav::Cell b = *cognav::snap_to_navigable(scene.grid, {7.5, 0.0, 5.5}, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(planner.shortest_path(a, b));
  }
}
BENCHMARK(BM_ShortestPathApartment);

void BM_ShortestPathRandomGrid(benchmark::State& state) {
  const cognav::OccupancyGrid grid =
      cognav::random_obstacle_grid(42, static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(0)), 0.3);
  cognav::PathPlanner planner(grid);
  std::vector<cognav::Cell> cells;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.navigable({c, r})) cells.push_back({c, r});
    }
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const cognav::Cell a = cells[i % cells.size()];
    const cognav::Cell b = cells[(i * 7 + 13) % cells.size()];
    ++i;
    benchmark::DoNotOptimize(planner.path_cost(a, b));
  }
}
BENCHMARK(BM_ShortestPathRandomGrid)->Arg(20)->Arg(40);

void BM_BuildCognitiveMap(benchmark::State& state) {
  const cognav::SceneAnnotation scene = cognav::fixture_scene(2);
  const cognav::MapConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cognav::build_cognitive_map(scene, cfg, 0));
  }
}
BENCHMARK(BM_BuildCognitiveMap);

void BM_SpectralCluster(benchmark::State& state) {
  const cognav::SceneAnnotation scene = cognav::fixture_scene(2);
  const std::vector<cognav::Landmark> landmarks =
      cognav::select_landmarks(scene, cognav::MapConfig{});
  const cognav::AffinityMatrix a = cognav::affinity_matrix(landmarks);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cognav::spectral_cluster(a.values, a.n, 3, 0));
  }
}
BENCHMARK(BM_SpectralCluster);

void BM_ParseModelOutput(benchmark::State& state) {
  const cognav::SceneAnnotation scene = cognav::fixture_scene(1);
  const cognav::CognitiveMap map = cognav::build_cognitive_map(scene, cognav::MapConfig{}, 0);
  const cognav::NavTask task = cognav::sample_task(scene, map, 0, cognav::TaskConfig{});
  const std::string text =
      "Here is my plan.\n```json\n" +
      cognav::serialize_reference_output(map, task.gt_chain) + "\n```\nDone.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(cognav::parse_model_output(text));
  }
}
BENCHMARK(BM_ParseModelOutput);

void BM_SampleTask(benchmark::State& state) {
  const cognav::SceneAnnotation scene = cognav::fixture_scene(1);
  const cognav::CognitiveMap map = cognav::build_cognitive_map(scene, cognav::MapConfig{}, 0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cognav::sample_task(scene, map, seed++, cognav::TaskConfig{}));
  }
}
BENCHMARK(BM_SampleTask);

}  // namespace

BENCHMARK_MAIN();
