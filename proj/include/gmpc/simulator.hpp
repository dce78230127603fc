#pragma once

#include "gmpc/lidar.hpp"
#include "gmpc/orca.hpp"
#include "gmpc/planner.hpp"
#include "gmpc/prediction.hpp"
#include "gmpc/world.hpp"

#include <string>
#include <vector>

namespace gmpc {

enum class Task { Flow, Cross };
enum class Condition { Offline, Online };
enum class Perception { GroundTruth, Lidar };
enum class Termination { Success, Collision, Timeout };

std::string to_string(Task t);
std::string to_string(Condition c);
std::string to_string(Perception p);
std::string to_string(Termination t);
Task task_from_string(const std::string& s);
Condition condition_from_string(const std::string& s);
Perception perception_from_string(const std::string& s);
Termination termination_from_string(const std::string& s);

struct TestRegion {
  Box2 box;
  bool contains(const Vec2& p) const { return box.contains(p); }
};

struct TrialSpec {
  std::string id;
  std::string scene;
  Task task = Task::Flow;
  Vec2 start = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
  int segment_begin = 0;  // indices into the resampled snapshot sequence
  int segment_end = 0;    // inclusive
  Condition condition = Condition::Offline;
  Perception perception = Perception::GroundTruth;
};

struct TrialRecord {
  TrialSpec spec;
  std::vector<Vec2> robot_trace;          // one position per executed step + start
  std::vector<WorldSnapshot> snapshots;   // ground-truth world per trace entry
  Termination termination = Termination::Timeout;
  std::string policy;
  double effective_lambda = 0.0;
  int timeout_steps = 0;
  unsigned seed = 0;
};

/// Maximal non-overlapping snapshot runs during which at least min_peds agents
/// are simultaneously inside the test region; one TrialSpec per run.
std::vector<TrialSpec> extract_trials(const std::vector<WorldSnapshot>& snapshots,
                                      const std::string& scene, const TestRegion& region,
                                      const Vec2& start, const Vec2& goal, Task task,
                                      int min_peds = 5, int min_len = 1);

/// Timeout budget of four direct-path times, at least one step.
int default_timeout_steps(double straight_line_distance, double v_max, double dt,
                          double factor = 4.0);

struct SimConfigs {
  WorldConfig world;
  GroupingConfig grouping;
  PlannerConfig planner;
  OracleConfig oracle;
  LidarConfig lidar;
  OrcaConfig orca;
};

/// Closed loop at dt: perceive, plan, apply the first control, advance the
/// world. Offline replays the recording; Online drives agents with ORCA
/// toward their recorded exit points. Deterministic given (spec, seed).
TrialRecord run_trial(const TrialSpec& spec, const std::vector<WorldSnapshot>& scene,
                      const SimConfigs& cfgs, unsigned seed,
                      const ExternalForecastStore* external = nullptr);

}  // namespace gmpc
