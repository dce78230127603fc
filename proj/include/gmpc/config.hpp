#pragma once

#include "gmpc/evaluation.hpp"
#include "gmpc/simulator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gmpc {

/// Per-scene dataset descriptor plus the scene-specific clustering scale.
/// Test regions and task endpoints are editable approximations.
struct SceneConfig {
  std::string name;
  std::string dataset_path;
  DatasetFormat format = DatasetFormat::FramePedXY;
  double frame_interval = 0.4;
  GroupingConfig grouping;
  Box2 region;
  Vec2 flow_start = Vec2::Zero();
  Vec2 flow_goal = Vec2::Zero();
  Vec2 cross_start = Vec2::Zero();
  Vec2 cross_goal = Vec2::Zero();
};

struct RunConfig {
  unsigned seed = 1;
  int workers = 2;
  std::string out_dir = "out";
  Condition condition = Condition::Offline;
  Perception perception = Perception::GroundTruth;
  std::vector<std::string> policies{"ped-nopred", "ped-linear", "group-nopred",
                                    "group-pred"};
  double lambda_offline = 0.65;
  double lambda_online = 0.3;
  std::optional<double> lambda_override;
  double timeout_factor = 4.0;
  int min_peds = 5;
  int min_segment_len = 1;
  int prediction_samples_per_scene = 200;
  std::string external_forecast_path;

  WorldConfig world;
  PlannerConfig planner;
  OracleConfig oracle;
  LidarConfig lidar;
  OrcaConfig orca;
  std::vector<SceneConfig> scenes;

  /// Effective lambda for the given condition unless overridden.
  double effective_lambda(Condition c) const {
    if (lambda_override.has_value()) return *lambda_override;
    return c == Condition::Offline ? lambda_offline : lambda_online;
  }

  SimConfigs sim_configs(const SceneConfig& scene, Condition c, PolicyKind policy) const;
  const SceneConfig* find_scene(const std::string& name) const;
};

/// The documented per-scene defaults: eps = (2.0 m, 30 deg, 1.0 m/s), C = 0.35
/// for eth/hotel/zara1/zara2 and eps = (1.5 m, 15 deg, 0.5 m/s), C = 0.25 for
/// univ; lambda 0.65 offline / 0.3 online; R = 12; h = f = 8; dt = 0.1;
/// v_max = 1.75.
RunConfig default_run_config();

RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

/// Throws std::invalid_argument describing the first violated invariant
/// (positive dt and speeds, threshold signs, horizon bounds, lambda range).
void validate(const RunConfig& config);

std::string to_json(const TrialSpec& spec);
TrialSpec trial_spec_from_json(const std::string& text);

std::string to_json(const TrialRecord& record);
TrialRecord trial_record_from_json(const std::string& text);

std::string to_json(const MetricsEntry& entry);
MetricsEntry metrics_entry_from_json(const std::string& text);

/// write-temp-then-rename so concurrent workers never leave partial files
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace gmpc
