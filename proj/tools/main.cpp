#include "gmpc/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

gmpc::RunConfig load_config_or_die(const std::string& path) {
  if (path.empty()) {
    throw CLI::ValidationError("--config is required for this subcommand");
  }
  return gmpc::load_run_config(path);
}

void apply_overrides(gmpc::RunConfig& config, const std::string& out,
                     const std::vector<std::string>& policies, int workers, long seed,
                     const std::string& condition, const std::string& perception) {
  if (!out.empty()) config.out_dir = out;
  if (!policies.empty()) config.policies = policies;
  if (workers > 0) config.workers = workers;
  if (seed >= 0) config.seed = static_cast<unsigned>(seed);
  if (!condition.empty()) config.condition = gmpc::condition_from_string(condition);
  if (!perception.empty()) config.perception = gmpc::perception_from_string(perception);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-based crowd navigation simulation and planning engine"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the shared options after the subcommand too

  std::string config_path;
  std::string out_override;
  std::vector<std::string> policies;
  int workers = 0;
  long seed = -1;
  std::string condition, perception;

  app.add_option("--config", config_path, "run configuration file (JSON)");
  app.add_option("--out", out_override, "output directory (overrides config)");
  app.add_option("--policies", policies, "policies to run (overrides config)")
      ->delimiter(',');
  app.add_option("--workers", workers, "worker thread count (overrides config)");
  app.add_option("--seed", seed, "run seed (overrides config)");
  app.add_option("--condition", condition, "offline | online");
  app.add_option("--perception", perception, "ground_truth | lidar");

  auto* init = app.add_subcommand("init-config", "write the default configuration");
  std::string init_path = "config.json";
  init->add_option("path", init_path, "where to write the config");

  auto* make_trials =
      app.add_subcommand("make-trials", "extract trial segments from the recordings");
  auto* run = app.add_subcommand("run", "execute every policy x trial pair");
  auto* report = app.add_subcommand("report", "aggregate metrics and emit the report");
  auto* eval_pred =
      app.add_subcommand("eval-prediction", "score the group-space prediction oracle");

  CLI11_PARSE(app, argc, argv);

  try {
    if (init->parsed()) {
      gmpc::save_run_config(gmpc::default_run_config(), init_path);
      std::cout << "wrote " << init_path << "\n";
      return 0;
    }

    gmpc::RunConfig config = load_config_or_die(config_path);
    apply_overrides(config, out_override, policies, workers, seed, condition, perception);
    const std::filesystem::path out_dir = config.out_dir;

    if (make_trials->parsed()) {
      gmpc::cmd_make_trials(config, out_dir, std::cout);
      return 0;
    }
    if (run->parsed()) {
      const gmpc::RunStats stats = gmpc::cmd_run(config, out_dir, std::cout);
      return stats.failed == 0 ? 0 : 1;
    }
    if (report->parsed()) {
      gmpc::cmd_report(config, out_dir, std::cout);
      return 0;
    }
    if (eval_pred->parsed()) {
      gmpc::cmd_eval_prediction(config, out_dir, std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
