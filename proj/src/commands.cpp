#include "gmpc/commands.hpp"

#include "gmpc/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace gmpc {

namespace fs = std::filesystem;

namespace {

std::vector<WorldSnapshot> load_scene_snapshots(const SceneConfig& scene, double dt) {
  const Recording recording = load_recording(scene.dataset_path, scene.format);
  return resample(recording, dt);
}

std::vector<TrialSpec> read_trial_file(const fs::path& path) {
  std::ifstream in(path);
  std::vector<TrialSpec> specs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    specs.push_back(trial_spec_from_json(line));
  }
  return specs;
}

/// Snapshots enriched with finite-difference velocities.
std::vector<WorldSnapshot> with_velocities(std::vector<WorldSnapshot> snaps, double dt) {
  for (std::size_t k = snaps.size(); k-- > 0;) {
    const WorldSnapshot& prev = snaps[k > 0 ? k - 1 : 0];
    snaps[k].agents = extract_augmented_states(prev, snaps[k], dt);
  }
  return snaps;
}

}  // namespace

unsigned derive_seed(unsigned base, const std::string& trial_id,
                     const std::string& policy) {
  // FNV-1a over the pair key, mixed with the run seed.
  std::uint64_t h = 1469598103934665603ull ^ base;
  for (char c : trial_id + "|" + policy) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return static_cast<unsigned>(h ^ (h >> 32));
}

std::map<std::pair<std::string, Task>, int> cmd_make_trials(
    const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  std::map<std::pair<std::string, Task>, int> counts;
  const fs::path trials_dir = out_dir / "trials";
  fs::create_directories(trials_dir);

  for (const SceneConfig& scene : config.scenes) {
    const auto snapshots = load_scene_snapshots(scene, config.world.dt);
    TestRegion region{scene.region};
    for (Task task : {Task::Flow, Task::Cross}) {
      const Vec2 start = task == Task::Flow ? scene.flow_start : scene.cross_start;
      const Vec2 goal = task == Task::Flow ? scene.flow_goal : scene.cross_goal;
      auto trials = extract_trials(snapshots, scene.name, region, start, goal, task,
                                   config.min_peds, config.min_segment_len);
      for (TrialSpec& spec : trials) {
        spec.condition = config.condition;
        spec.perception = config.perception;
      }
      std::ostringstream body;
      for (const TrialSpec& spec : trials) body << to_json(spec) << "\n";
      atomic_write(trials_dir / (scene.name + "_" + to_string(task) + ".jsonl"),
                   body.str());
      counts[{scene.name, task}] = static_cast<int>(trials.size());
    }
  }

  // summary in the per-task x per-scene table shape
  std::ostringstream summary;
  summary << "task";
  for (const SceneConfig& scene : config.scenes) summary << "," << scene.name;
  summary << "\n";
  for (Task task : {Task::Flow, Task::Cross}) {
    summary << to_string(task);
    for (const SceneConfig& scene : config.scenes) {
      summary << "," << counts[{scene.name, task}];
    }
    summary << "\n";
  }
  atomic_write(trials_dir / "summary.csv", summary.str());
  log << summary.str();
  return counts;
}

RunStats cmd_run(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const fs::path trials_dir = out_dir / "trials";
  const fs::path records_dir = out_dir / "records";
  const fs::path metrics_dir = out_dir / "metrics";
  fs::create_directories(records_dir);
  fs::create_directories(metrics_dir);

  struct Pair {
    TrialSpec spec;
    PolicyKind policy;
    std::string policy_name;
  };
  std::vector<Pair> pairs;
  std::vector<fs::path> trial_files;
  if (!fs::exists(trials_dir)) {
    throw std::runtime_error("no trial files under " + trials_dir.string() +
                             "; run make-trials first");
  }
  for (const auto& entry : fs::directory_iterator(trials_dir)) {
    if (entry.path().extension() == ".jsonl") trial_files.push_back(entry.path());
  }
  std::sort(trial_files.begin(), trial_files.end());
  for (const fs::path& file : trial_files) {
    for (TrialSpec spec : read_trial_file(file)) {
      spec.condition = config.condition;
      spec.perception = config.perception;
      for (const std::string& policy : config.policies) {
        pairs.push_back({spec, policy_from_string(policy), policy});
      }
    }
  }

  // Scene snapshots loaded once, shared read-only across workers.
  std::map<std::string, std::vector<WorldSnapshot>> scenes;
  for (const Pair& pair : pairs) {
    if (scenes.count(pair.spec.scene)) continue;
    const SceneConfig* scene = config.find_scene(pair.spec.scene);
    if (scene == nullptr) {
      throw std::runtime_error("trial references unknown scene: " + pair.spec.scene);
    }
    scenes[pair.spec.scene] = load_scene_snapshots(*scene, config.world.dt);
  }

  ExternalForecastStore external;
  const bool use_external = config.oracle.kind == OracleKind::External;
  if (use_external) {
    external = ExternalForecastStore::load(config.external_forecast_path);
  }

  RunStats stats;
  std::atomic<std::size_t> next{0};
  std::mutex mutex;  // guards stats and the log

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pairs.size()) return;
      const Pair& pair = pairs[i];
      const std::string stem = pair.spec.id + "__" + pair.policy_name;
      const fs::path record_path = records_dir / (stem + ".json");
      const fs::path metrics_path = metrics_dir / (stem + ".json");
      if (fs::exists(record_path) && fs::exists(metrics_path)) {
        std::lock_guard lock(mutex);
        ++stats.skipped;
        continue;
      }
      try {
        const SceneConfig* scene_cfg = config.find_scene(pair.spec.scene);
        const SimConfigs cfgs =
            config.sim_configs(*scene_cfg, pair.spec.condition, pair.policy);
        const unsigned seed = derive_seed(config.seed, pair.spec.id, pair.policy_name);
        const TrialRecord record =
            run_trial(pair.spec, scenes.at(pair.spec.scene), cfgs, seed,
                      use_external ? &external : nullptr);
        MetricsEntry entry;
        entry.policy = pair.policy_name;
        entry.scene = pair.spec.scene;
        entry.task = pair.spec.task;
        entry.condition = pair.spec.condition;
        entry.trial_id = pair.spec.id;
        entry.metrics = score_trial(record, scene_cfg->grouping);
        atomic_write(record_path, to_json(record));
        atomic_write(metrics_path, to_json(entry));
        std::lock_guard lock(mutex);
        ++stats.executed;
      } catch (const std::exception& e) {
        std::lock_guard lock(mutex);
        ++stats.failed;
        log << "trial failed: " << stem << ": " << e.what() << "\n";
        std::ofstream errs(out_dir / "errors.log", std::ios::app);
        errs << stem << "\t" << e.what() << "\n";
      }
    }
  };

  const int n_workers = std::max(1, config.workers);
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();

  log << "executed " << stats.executed << ", skipped " << stats.skipped << ", failed "
      << stats.failed << "\n";
  return stats;
}

bool cmd_report(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const fs::path metrics_dir = out_dir / "metrics";
  const fs::path report_dir = out_dir / "report";

  std::vector<MetricsEntry> entries;
  if (fs::exists(metrics_dir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(metrics_dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
      std::ifstream in(file);
      std::stringstream buffer;
      buffer << in.rdbuf();
      entries.push_back(metrics_entry_from_json(buffer.str()));
    }
  }
  if (entries.empty()) {
    log << "no metrics found under " << metrics_dir << "; nothing to report\n";
    return false;
  }

  const ComparisonReport report = build_report(entries);
  fs::create_directories(report_dir);
  atomic_write(report_dir / "aggregates.csv", report_csv(report));
  atomic_write(report_dir / "tests.csv", tests_csv(report));
  const std::string table = report_table(report);
  atomic_write(report_dir / "report.txt", table);
  log << table;

  // Trace files for external plotting: robot polyline plus hull outlines.
  const fs::path records_dir = out_dir / "records";
  const fs::path traces_dir = report_dir / "traces";
  if (fs::exists(records_dir)) {
    fs::create_directories(traces_dir);
    for (const auto& file : fs::directory_iterator(records_dir)) {
      if (file.path().extension() != ".json") continue;
      std::ifstream in(file.path());
      std::stringstream buffer;
      buffer << in.rdbuf();
      const TrialRecord record = trial_record_from_json(buffer.str());
      const SceneConfig* scene_cfg = config.find_scene(record.spec.scene);
      const GroupingConfig grouping =
          scene_cfg != nullptr ? scene_cfg->grouping : GroupingConfig{};

      std::ostringstream trace;
      trace << std::setprecision(10);
      for (std::size_t k = 0; k < record.robot_trace.size(); ++k) {
        trace << "robot " << k << " " << record.robot_trace[k].x() << " "
              << record.robot_trace[k].y() << "\n";
      }
      for (std::size_t k = 0; k < record.snapshots.size(); ++k) {
        const auto& agents = record.snapshots[k].agents;
        if (agents.empty()) continue;
        const auto groups = cluster_groups(agents, grouping);
        for (const GroupSpace& gs :
             group_spaces(groups, agents, grouping.C, grouping.boundary_samples)) {
          trace << "hull " << k << " " << gs.label;
          for (const Vec2& v : gs.polygon) trace << " " << v.x() << " " << v.y();
          trace << "\n";
        }
      }
      atomic_write(traces_dir / (file.path().stem().string() + ".txt"), trace.str());
    }
  }
  return true;
}

std::map<std::string, PredictionCell> cmd_eval_prediction(const RunConfig& config,
                                                          const fs::path& out_dir,
                                                          std::ostream& log) {
  std::map<std::string, PredictionCell> cells;
  const int h = config.oracle.history_len;
  const int f = config.oracle.horizon;

  for (const SceneConfig& scene : config.scenes) {
    const Recording recording = load_recording(scene.dataset_path, scene.format);
    // Sequences sampled at the annotation rate, the granularity the shapes
    // were recorded at.
    auto snapshots = with_velocities(
        resample(recording, scene.frame_interval), scene.frame_interval);
    const int window = h + f;
    PredictionCell cell;
    if (static_cast<int>(snapshots.size()) >= window) {
      std::mt19937 rng(config.seed);
      std::uniform_int_distribution<int> start_dist(
          1, static_cast<int>(snapshots.size()) - window);
      double sum_miou = 0.0, sum_fiou = 0.0;
      int attempts = 0;
      const int max_attempts = config.prediction_samples_per_scene * 20;
      while (cell.samples < config.prediction_samples_per_scene &&
             attempts < max_attempts) {
        ++attempts;
        const int t0 = start_dist(rng);
        const int anchor = t0 + h - 1;
        if (snapshots[anchor].agents.empty()) continue;
        const auto groups = cluster_groups(snapshots[anchor].agents, scene.grouping);
        std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
        const Group& group = groups[pick(rng)];

        // every member must be observed across the whole window
        bool complete = true;
        std::vector<std::unordered_map<int, AugmentedAgentState>> frames(window);
        for (int k = 0; k < window && complete; ++k) {
          frames[k] = index_by_id(snapshots[t0 + k].agents);
          for (int id : group.members) {
            if (!frames[k].count(id)) {
              complete = false;
              break;
            }
          }
        }
        if (!complete) continue;

        GroupSpaceSequence history, actual;
        history.label = actual.label = group.label;
        for (int k = 0; k < window; ++k) {
          const GroupSpace gs = group_space(group, frames[k], scene.grouping.C,
                                            scene.grouping.boundary_samples);
          if (k < h) {
            history.spaces.push_back(gs);
          } else {
            actual.spaces.push_back(gs);
          }
        }
        OracleConfig oracle = config.oracle;
        oracle.horizon = f;
        const GroupSpaceSequence forecast = predict(history, oracle);
        const auto [miou, fiou] = evaluate_sequence(forecast, actual, 0.05);
        sum_miou += miou;
        sum_fiou += fiou;
        ++cell.samples;
      }
      if (cell.samples > 0) {
        cell.miou = 100.0 * sum_miou / cell.samples;
        cell.fiou = 100.0 * sum_fiou / cell.samples;
      }
    }
    cells[scene.name] = cell;
  }

  std::ostringstream table;
  table << "metric";
  for (const SceneConfig& scene : config.scenes) table << "," << scene.name;
  table << "\n";
  for (const char* metric : {"mIoU", "fIoU"}) {
    table << metric;
    for (const SceneConfig& scene : config.scenes) {
      const PredictionCell& cell = cells[scene.name];
      table << ",";
      if (cell.samples == 0) {
        table << "n/a";
      } else {
        table << std::fixed << std::setprecision(2)
              << (metric == std::string("mIoU") ? cell.miou : cell.fiou);
      }
    }
    table << "\n";
  }
  fs::create_directories(out_dir / "prediction");
  atomic_write(out_dir / "prediction" / "table.csv", table.str());
  log << table.str();
  return cells;
}

}  // namespace gmpc
