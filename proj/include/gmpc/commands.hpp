#pragma once

#include "gmpc/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gmpc {

/// Trial extraction across all configured scenes. Writes one JSONL file per
/// scene and task under <out>/trials plus a per-scene count summary. Returns
/// the counts keyed by (scene, task).
std::map<std::pair<std::string, Task>, int> cmd_make_trials(
    const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

struct RunStats {
  int executed = 0;
  int skipped = 0;
  int failed = 0;
};

/// Executes every (policy x trial) pair found under <out>/trials, writing a
/// TrialRecord and a metrics entry per pair. Pairs whose record file already
/// exists are skipped, so an interrupted batch resumes where it stopped.
RunStats cmd_run(const RunConfig& config, const std::filesystem::path& out_dir,
                 std::ostream& log);

/// Aggregates all metrics files into the comparison report (CSV + table) and
/// emits per-trial trace files (robot polyline plus group hull outlines per
/// step) for external plotting. Returns false when no metrics exist.
bool cmd_report(const RunConfig& config, const std::filesystem::path& out_dir,
                std::ostream& log);

struct PredictionCell {
  int samples = 0;
  double miou = 0.0;  // percent
  double fiou = 0.0;  // percent
};

/// Samples group-space sequences of length h+f from each scene recording at
/// the annotation rate, runs the configured oracle, and reports per-scene
/// mIoU/fIoU.
std::map<std::string, PredictionCell> cmd_eval_prediction(
    const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Deterministic per-(trial, policy) seed derived from the run seed.
unsigned derive_seed(unsigned base, const std::string& trial_id,
                     const std::string& policy);

}  // namespace gmpc
