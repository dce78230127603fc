#pragma once

#include "gmpc/grouping.hpp"
#include "gmpc/simulator.hpp"

#include <map>
#include <string>
#include <vector>

namespace gmpc {

struct TrialMetrics {
  bool success = false;
  bool comfort = false;  // never inside any ground-truth group space
  double min_ped_distance = 0.0;
  double path_length = 0.0;
};

/// Scores one executed trial. Comfort is judged against ground-truth group
/// spaces rebuilt at the scene's nominal C from the recorded snapshots,
/// independent of whatever the policy perceived; a collision always counts as
/// an intrusion.
TrialMetrics score_trial(const TrialRecord& record, const GroupingConfig& grouping);

struct MannWhitneyResult {
  double U = 0.0;  // U statistic of the first sample
  double p = 1.0;  // two-sided
};

/// Rank-sum U with midrank ties. The p-value is exact (full enumeration of
/// group assignments) when n_a + n_b <= 12, otherwise a tie-corrected normal
/// approximation with continuity correction. Two identical flat samples give
/// p = 1.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b);

std::string significance_stars(double p);

struct MetricsEntry {
  std::string policy;
  std::string scene;
  Task task = Task::Flow;
  Condition condition = Condition::Offline;
  std::string trial_id;
  TrialMetrics metrics;
};

struct CellKey {
  std::string policy;
  std::string scene;
  Task task;
  Condition condition;
  auto operator<=>(const CellKey&) const = default;
};

struct CellAggregate {
  int trials = 0;
  double success_rate = 0.0;   // percent
  double comfort_rate = 0.0;   // percent
  double mean_min_distance = 0.0;
  double sd_min_distance = 0.0;
  double mean_path_length = 0.0;
  double sd_path_length = 0.0;
};

struct PairwiseTest {
  std::string metric;  // "min_distance" or "path_length"
  std::string scene;
  Task task;
  Condition condition;
  std::string policy_a;
  std::string policy_b;
  double U = 0.0;
  double p = 1.0;
  std::string stars;
};

struct ComparisonReport {
  std::map<CellKey, CellAggregate> cells;
  std::vector<PairwiseTest> tests;
  std::vector<std::string> missing;  // scene/task cells with a single policy
};

/// Aggregates metrics per (policy, scene, task, condition) and runs pairwise
/// two-sided tests on the continuous metrics for every policy pair sharing a
/// cell. Rates are reported descriptively.
ComparisonReport build_report(const std::vector<MetricsEntry>& entries);

/// Human-readable table mirroring the per-scene results layout.
std::string report_table(const ComparisonReport& report);

/// One row per policy x scene x task x condition x metric.
std::string report_csv(const ComparisonReport& report);

/// One row per pairwise test.
std::string tests_csv(const ComparisonReport& report);

}  // namespace gmpc
