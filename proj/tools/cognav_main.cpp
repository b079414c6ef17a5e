#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cognav/commands.hpp"
#include "cognav/selfcheck.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hierarchical cognitive-map navigation toolkit"};
  app.require_subcommand(1);

  std::string scene;
  std::string config;
  std::string map;
  std::string tasks;
  std::string outputs;
  std::string records;
  std::string out;
  std::uint64_t seed = 0;
  int count = 0;
  bool strict = false;
  std::vector<double> band_values;

  CLI::App* build = app.add_subcommand("build-map", "Build the cognitive map for a scene");
  build->add_option("--scene", scene, "Scene JSON file")->required();
  build->add_option("--config", config, "Run configuration JSON file");
  build->add_option("--seed", seed, "Deterministic seed")->required();
  build->add_option("--out", out, "Output map JSON path")->required();

  CLI::App* gen = app.add_subcommand("gen-tasks", "Sample navigation tasks from a map");
  gen->add_option("--scene", scene, "Scene JSON file")->required();
  gen->add_option("--map", map, "Cognitive map JSON file")->required();
  gen->add_option("--config", config, "Run configuration JSON file");
  gen->add_option("--count", count, "Number of tasks")->required();
  gen->add_option("--seed", seed, "Deterministic seed; task i uses seed+i")->required();
  gen->add_option("--out", out, "Output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "Score model outputs against tasks");
  eval->add_option("--tasks", tasks, "Directory of task JSON files")->required();
  eval->add_option("--outputs", outputs, "JSON-lines of {task_id, model_text}")->required();
  eval->add_option("--scene", scene, "Scene JSON file")->required();
  eval->add_option("--config", config, "Run configuration JSON file");
  eval->add_flag("--strict-parse", strict, "Whole output must be one JSON document");
  eval->add_option("--out", out, "Report JSON path")->required();

  CLI::App* cogrs = app.add_subcommand("cogrs", "Filter scored records by perplexity band");
  cogrs->add_option("--records", records, "JSON-lines of scored records")->required();
  cogrs
      ->add_option("--band", band_values,
                   "tau_min tau_max; omitted selects the corpus percentile band")
      ->expected(2);
  cogrs->add_option("--out", out, "Summary JSON path; kept ids go to <out>.ids")->required();

  CLI::App* selfcheck = app.add_subcommand("selfcheck", "Run the acceptance battery");

  CLI11_PARSE(app, argc, argv);

  cognav::CommandStreams io{std::cout, std::cerr};
  try {
    if (build->parsed()) return cognav::cmd_build_map(scene, config, seed, out, io);
    if (gen->parsed()) return cognav::cmd_gen_tasks(scene, map, config, count, seed, out, io);
    if (eval->parsed()) return cognav::cmd_eval(tasks, outputs, scene, config, strict, out, io);
    if (cogrs->parsed()) {
      std::optional<cognav::PerplexityBand> band;
      if (!band_values.empty()) band = cognav::PerplexityBand{band_values[0], band_values[1]};
      return cognav::cmd_cogrs(records, band, out, io);
    }
    if (selfcheck->parsed()) return cognav::run_selfcheck(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
