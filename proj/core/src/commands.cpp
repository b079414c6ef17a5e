#include "cognav/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "canon_json.hpp"
#include "cognav/codec.hpp"
#include "cognav/cogmap.hpp"
#include "cognav/config.hpp"
#include "cognav/errors.hpp"
#include "cognav/metrics.hpp"
#include "cognav/scene.hpp"
#include "cognav/tasks.hpp"
#include "json_schema.hpp"

namespace cognav {

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kIoError = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  out.flush();
  return out.good();
}

// Loads a config file, or defaults when path is empty. Returns nullopt after
// reporting, with the exit code in `code`.
std::optional<RunConfig> load_config(const std::string& path, CommandStreams io, int& code) {
  if (path.empty()) return RunConfig{};
  const auto text = read_file(path);
  if (!text) {
    io.err << "error: cannot read config file '" << path << "'\n";
    code = kIoError;
    return std::nullopt;
  }
  try {
    return parse_config(*text);
  } catch (const Error& e) {
    io.err << "error: config '" << path << "': " << e.what() << "\n";
    code = kValidationError;
    return std::nullopt;
  }
}

std::optional<SceneAnnotation> load_scene(const std::string& path, CommandStreams io,
                                          int& code) {
  const auto text = read_file(path);
  if (!text) {
    io.err << "error: cannot read scene file '" << path << "'\n";
    code = kIoError;
    return std::nullopt;
  }
  try {
    return parse_scene(*text);
  } catch (const Error& e) {
    io.err << "error: scene '" << path << "': " << e.what() << "\n";
    code = kValidationError;
    return std::nullopt;
  }
}

}  // namespace

int cmd_build_map(const std::string& scene_path, const std::string& config_path,
                  std::uint64_t seed, const std::string& out_path, CommandStreams io) {
  int code = kOk;
  const auto config = load_config(config_path, io, code);
  if (!config) return code;
  const auto scene = load_scene(scene_path, io, code);
  if (!scene) return code;

  CognitiveMap map;
  try {
    map = build_cognitive_map(*scene, to_map_config(*config), seed);
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  if (!write_file(out_path, serialize_map(map))) {
    io.err << "error: cannot write '" << out_path << "'\n";
    return kIoError;
  }
  io.out << "landmarks " << map.landmarks.size() << " regions " << map.regions.size()
         << " attachments " << map.attachments.size() << "\n";
  return kOk;
}

int cmd_gen_tasks(const std::string& scene_path, const std::string& map_path,
                  const std::string& config_path, int n, std::uint64_t seed,
                  const std::string& out_dir, CommandStreams io) {
  if (n < 1) {
    io.err << "error: task count must be >= 1\n";
    return kValidationError;
  }
  int code = kOk;
  const auto config = load_config(config_path, io, code);
  if (!config) return code;
  const auto scene = load_scene(scene_path, io, code);
  if (!scene) return code;
  const auto map_text = read_file(map_path);
  if (!map_text) {
    io.err << "error: cannot read map file '" << map_path << "'\n";
    return kIoError;
  }
  CognitiveMap map;
  try {
    map = parse_map(*map_text);
  } catch (const Error& e) {
    io.err << "error: map '" << map_path << "': " << e.what() << "\n";
    return kValidationError;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    io.err << "error: cannot create directory '" << out_dir << "'\n";
    return kIoError;
  }

  const TaskConfig task_cfg = to_task_config(*config);
  std::size_t strata_counts[3] = {0, 0, 0};
  std::vector<std::string> task_ids;
  for (int i = 0; i < n; ++i) {
    NavTask task;
    try {
      task = sample_task(*scene, map, seed + static_cast<std::uint64_t>(i), task_cfg);
    } catch (const Error& e) {
      io.err << "error: sampling task " << i << ": " << e.what() << "\n";
      return kValidationError;
    }
    const std::string path =
        (std::filesystem::path(out_dir) / (task.task_id + ".json")).string();
    if (!write_file(path, serialize_task(task))) {
      io.err << "error: cannot write '" << path << "'\n";
      return kIoError;
    }
    ++strata_counts[static_cast<int>(task.stratum)];
    task_ids.push_back(task.task_id);
  }

  nlohmann::json manifest = nlohmann::json::object();
  manifest["scene_id"] = scene->scene_id;
  manifest["seed"] = seed;
  manifest["count"] = n;
  nlohmann::json strata = nlohmann::json::object();
  strata["short"] = strata_counts[0];
  strata["medium"] = strata_counts[1];
  strata["long"] = strata_counts[2];
  manifest["strata"] = std::move(strata);
  manifest["task_ids"] = task_ids;
  const std::string manifest_path =
      (std::filesystem::path(out_dir) / "manifest.json").string();
  if (!write_file(manifest_path, detail::canonical_dump(manifest))) {
    io.err << "error: cannot write '" << manifest_path << "'\n";
    return kIoError;
  }
  io.out << "tasks " << n << " short " << strata_counts[0] << " medium " << strata_counts[1]
         << " long " << strata_counts[2] << "\n";
  return kOk;
}

int cmd_eval(const std::string& tasks_dir, const std::string& outputs_path,
             const std::string& scene_path, const std::string& config_path, bool strict_parse,
             const std::string& report_path, CommandStreams io) {
  int code = kOk;
  const auto config = load_config(config_path, io, code);
  if (!config) return code;
  const auto scene = load_scene(scene_path, io, code);
  if (!scene) return code;

  std::error_code ec;
  std::vector<std::filesystem::path> task_files;
  for (const auto& entry : std::filesystem::directory_iterator(tasks_dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() == ".json" && p.filename() != "manifest.json") task_files.push_back(p);
  }
  if (ec) {
    io.err << "error: cannot list '" << tasks_dir << "'\n";
    return kIoError;
  }
  if (task_files.empty()) {
    io.err << "error: no task files in '" << tasks_dir << "'\n";
    return kValidationError;
  }
  std::sort(task_files.begin(), task_files.end());

  std::vector<NavTask> tasks;
  for (const auto& path : task_files) {
    const auto text = read_file(path.string());
    if (!text) {
      io.err << "error: cannot read task file '" << path.string() << "'\n";
      return kIoError;
    }
    try {
      tasks.push_back(parse_task(*text));
    } catch (const Error& e) {
      io.err << "error: task '" << path.string() << "': " << e.what() << "\n";
      return kValidationError;
    }
    if (tasks.back().scene_id != scene->scene_id) {
      io.err << "error: task '" << tasks.back().task_id << "' belongs to scene '"
             << tasks.back().scene_id << "', not '" << scene->scene_id << "'\n";
      return kValidationError;
    }
  }

  const auto outputs_text = read_file(outputs_path);
  if (!outputs_text) {
    io.err << "error: cannot read outputs file '" << outputs_path << "'\n";
    return kIoError;
  }
  std::map<std::string, std::string> outputs;
  {
    std::istringstream lines(*outputs_text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.empty()) continue;
      nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
      if (doc.is_discarded() || !doc.is_object() || !doc.contains("task_id") ||
          !doc["task_id"].is_string() || !doc.contains("model_text") ||
          !doc["model_text"].is_string()) {
        io.err << "outputs line " << lineno
               << ": expected {\"task_id\", \"model_text\"}, skipped\n";
        continue;
      }
      const std::string task_id = doc["task_id"].get<std::string>();
      const bool known = std::any_of(tasks.begin(), tasks.end(), [&](const NavTask& t) {
        return t.task_id == task_id;
      });
      if (!known) {
        io.err << "outputs line " << lineno << ": unknown task_id '" << task_id
               << "', skipped\n";
        continue;
      }
      outputs[task_id] = doc["model_text"].get<std::string>();
    }
  }

  // Regions never enter the metrics, so the rebuild seed is immaterial; zero
  // keeps reports reproducible.
  CognitiveMap gt_map;
  try {
    gt_map = build_cognitive_map(*scene, to_map_config(*config), 0);
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  EvalContext ctx;
  ctx.scene = &*scene;
  ctx.gt_map = &gt_map;
  ctx.params = to_eval_params(*config);

  std::vector<InstanceReport> instances;
  for (const NavTask& task : tasks) {
    const auto it = outputs.find(task.task_id);
    const std::string text = it == outputs.end() ? std::string() : it->second;
    const ModelOutput output = parse_model_output(text, strict_parse);
    instances.push_back(evaluate_instance(task, output, ctx));
  }

  const BenchmarkReport agg = aggregate(instances);
  if (!write_file(report_path, serialize_report(instances, agg))) {
    io.err << "error: cannot write '" << report_path << "'\n";
    return kIoError;
  }
  io.out << format_report_grid(agg);
  return kOk;
}

int cmd_cogrs(const std::string& records_path, const std::optional<PerplexityBand>& band,
              const std::string& out_path, CommandStreams io) {
  const auto text = read_file(records_path);
  if (!text) {
    io.err << "error: cannot read records file '" << records_path << "'\n";
    return kIoError;
  }
  std::vector<TokenLogProbRecord> records;
  std::size_t malformed = 0;
  {
    std::istringstream lines(*text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        records.push_back(parse_record_line(line));
      } catch (const Error& e) {
        io.err << "records line " << lineno << ": " << e.what() << ", skipped\n";
        ++malformed;
      }
    }
  }

  PerplexityBand effective;
  try {
    if (band) {
      effective = *band;
      validate(effective);
    } else {
      std::vector<double> ppls;
      ppls.reserve(records.size());
      for (const TokenLogProbRecord& r : records) ppls.push_back(span_perplexity(r));
      effective = percentile_band(std::move(ppls));
    }
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  const FilterOutcome outcome = filter_band(records, effective);

  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json jband = nlohmann::json::object();
  jband["tau_min"] = effective.tau_min;
  jband["tau_max"] = effective.tau_max;
  summary["band"] = std::move(jband);
  nlohmann::json counts = nlohmann::json::object();
  counts["below"] = outcome.below;
  counts["kept"] = outcome.kept.size();
  counts["above"] = outcome.above;
  counts["malformed"] = malformed;
  summary["counts"] = std::move(counts);
  nlohmann::json kept = nlohmann::json::array();
  std::string ids_text;
  for (const KeptSample& k : outcome.kept) {
    nlohmann::json jk = nlohmann::json::object();
    jk["sample_id"] = k.sample_id;
    jk["ppl"] = k.ppl;
    kept.push_back(std::move(jk));
    ids_text += k.sample_id;
    ids_text += '\n';
  }
  summary["kept"] = std::move(kept);

  if (!write_file(out_path, detail::canonical_dump(summary))) {
    io.err << "error: cannot write '" << out_path << "'\n";
    return kIoError;
  }
  if (!write_file(out_path + ".ids", ids_text)) {
    io.err << "error: cannot write '" << out_path << ".ids'\n";
    return kIoError;
  }
  io.out << "below " << outcome.below << " kept " << outcome.kept.size() << " above "
         << outcome.above << " malformed " << malformed << "\n";
  return kOk;
}

}  // namespace cognav
