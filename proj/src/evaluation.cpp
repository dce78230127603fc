#include "gmpc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace gmpc {

TrialMetrics score_trial(const TrialRecord& record, const GroupingConfig& grouping) {
  TrialMetrics m;
  m.success = record.termination == Termination::Success;
  m.comfort = record.termination != Termination::Collision;
  m.min_ped_distance = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < record.robot_trace.size(); ++k) {
    const Vec2& robot = record.robot_trace[k];
    const std::vector<AugmentedAgentState>& agents = record.snapshots[k].agents;
    for (const AugmentedAgentState& a : agents) {
      m.min_ped_distance = std::min(m.min_ped_distance, (robot - a.position).norm());
    }
    if (k > 0) {
      m.path_length += (robot - record.robot_trace[k - 1]).norm();
    }
    if (m.comfort && !agents.empty()) {
      const auto groups = cluster_groups(agents, grouping);
      for (const GroupSpace& gs :
           group_spaces(groups, agents, grouping.C, grouping.boundary_samples)) {
        if (signed_distance(robot, gs.polygon) < 0.0) {
          m.comfort = false;
          break;
        }
      }
    }
  }
  return m;
}

namespace {

/// Midranks of the pooled sample; ties share the average rank.
std::vector<double> midranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Exact two-sided p by enumerating every assignment of n_a of the pooled
/// ranks to the first sample.
double exact_two_sided_p(const std::vector<double>& ranks, std::size_t n_a, double U_obs) {
  const std::size_t n = ranks.size();
  const double mu = 0.5 * static_cast<double>(n_a) * static_cast<double>(n - n_a);
  const double dev_obs = std::fabs(U_obs - mu) - 1e-12;

  long long total = 0;
  long long at_least = 0;
  std::vector<std::size_t> pick(n_a);
  std::iota(pick.begin(), pick.end(), 0);
  const double offset = 0.5 * static_cast<double>(n_a) * static_cast<double>(n_a + 1);
  while (true) {
    double rank_sum = 0.0;
    for (std::size_t idx : pick) rank_sum += ranks[idx];
    const double U = rank_sum - offset;
    ++total;
    at_least += std::fabs(U - mu) >= dev_obs;

    // next combination
    std::size_t i = n_a;
    while (i > 0) {
      --i;
      if (pick[i] != i + n - n_a) break;
    }
    if (pick[i] == i + n - n_a) break;
    ++pick[i];
    for (std::size_t j = i + 1; j < n_a; ++j) pick[j] = pick[j - 1] + 1;
  }
  return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("mann_whitney_u: empty sample");
  }
  const std::size_t n_a = a.size();
  const std::size_t n_b = b.size();
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);

  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < n_a; ++i) rank_sum_a += ranks[i];
  const double U = rank_sum_a - 0.5 * static_cast<double>(n_a) * static_cast<double>(n_a + 1);

  MannWhitneyResult result;
  result.U = U;

  // Degenerate pooled sample: no ordering information at all.
  const bool all_equal =
      std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; });
  if (all_equal) {
    result.p = 1.0;
    return result;
  }

  if (n_a + n_b <= 12) {
    result.p = exact_two_sided_p(ranks, n_a, U);
    return result;
  }

  const double n = static_cast<double>(n_a + n_b);
  const double mu = 0.5 * static_cast<double>(n_a) * static_cast<double>(n_b);
  double tie_term = 0.0;
  std::size_t i = 0;
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double variance = (static_cast<double>(n_a) * static_cast<double>(n_b) / 12.0) *
                          ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) {
    result.p = 1.0;
    return result;
  }
  const double z = (std::fabs(U - mu) - 0.5) / std::sqrt(variance);
  result.p = std::clamp(2.0 * normal_sf(std::max(z, 0.0)), 0.0, 1.0);
  return result;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

ComparisonReport build_report(const std::vector<MetricsEntry>& entries) {
  ComparisonReport report;

  std::map<CellKey, std::vector<const TrialMetrics*>> cells;
  for (const MetricsEntry& e : entries) {
    cells[{e.policy, e.scene, e.task, e.condition}].push_back(&e.metrics);
  }

  for (const auto& [key, metrics] : cells) {
    CellAggregate agg;
    agg.trials = static_cast<int>(metrics.size());
    std::vector<double> dist, path;
    int successes = 0, comforts = 0;
    for (const TrialMetrics* m : metrics) {
      successes += m->success;
      comforts += m->comfort;
      if (std::isfinite(m->min_ped_distance)) dist.push_back(m->min_ped_distance);
      path.push_back(m->path_length);
    }
    auto mean_sd = [](const std::vector<double>& xs, double& mean, double& sd) {
      if (xs.empty()) {
        mean = sd = 0.0;
        return;
      }
      mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      sd = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1)) : 0.0;
    };
    agg.success_rate = 100.0 * successes / agg.trials;
    agg.comfort_rate = 100.0 * comforts / agg.trials;
    mean_sd(dist, agg.mean_min_distance, agg.sd_min_distance);
    mean_sd(path, agg.mean_path_length, agg.sd_path_length);
    report.cells[key] = agg;
  }

  // Pairwise tests per (scene, task, condition) over the continuous metrics.
  std::set<std::tuple<std::string, Task, Condition>> scenarios;
  for (const auto& [key, agg] : report.cells) {
    scenarios.insert({key.scene, key.task, key.condition});
  }
  for (const auto& [scene, task, condition] : scenarios) {
    std::vector<std::string> policies;
    for (const auto& [key, agg] : report.cells) {
      if (key.scene == scene && key.task == task && key.condition == condition) {
        policies.push_back(key.policy);
      }
    }
    if (policies.size() < 2) {
      report.missing.push_back(scene + "/" + to_string(task) + "/" + to_string(condition) +
                               ": single policy, no tests");
      continue;
    }
    auto samples = [&](const std::string& policy, bool distance) {
      std::vector<double> xs;
      for (const MetricsEntry& e : entries) {
        if (e.policy != policy || e.scene != scene || e.task != task ||
            e.condition != condition) {
          continue;
        }
        const double v = distance ? e.metrics.min_ped_distance : e.metrics.path_length;
        if (std::isfinite(v)) xs.push_back(v);
      }
      return xs;
    };
    for (std::size_t i = 0; i < policies.size(); ++i) {
      for (std::size_t j = i + 1; j < policies.size(); ++j) {
        for (bool distance : {true, false}) {
          const std::vector<double> xa = samples(policies[i], distance);
          const std::vector<double> xb = samples(policies[j], distance);
          if (xa.empty() || xb.empty()) continue;
          const MannWhitneyResult mw = mann_whitney_u(xa, xb);
          PairwiseTest test;
          test.metric = distance ? "min_distance" : "path_length";
          test.scene = scene;
          test.task = task;
          test.condition = condition;
          test.policy_a = policies[i];
          test.policy_b = policies[j];
          test.U = mw.U;
          test.p = mw.p;
          test.stars = significance_stars(mw.p);
          report.tests.push_back(std::move(test));
        }
      }
    }
  }
  return report;
}

std::string report_table(const ComparisonReport& report) {
  std::ostringstream out;
  out << "policy                scene      task   cond     n      S%      C%     D(m)    L(m)\n";
  for (const auto& [key, agg] : report.cells) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-20s  %-9s  %-5s  %-7s %4d  %6.2f  %6.2f  %6.2f  %6.2f\n",
                  key.policy.c_str(), key.scene.c_str(), to_string(key.task).c_str(),
                  to_string(key.condition).c_str(), agg.trials, agg.success_rate,
                  agg.comfort_rate, agg.mean_min_distance, agg.mean_path_length);
    out << line;
  }
  if (!report.tests.empty()) {
    out << "\npairwise Mann-Whitney U (two-sided)\n";
    for (const PairwiseTest& t : report.tests) {
      char line[256];
      std::snprintf(line, sizeof(line), "%-12s %-9s %-5s %-7s  %-18s vs %-18s U=%8.1f  p=%.4g %s\n",
                    t.metric.c_str(), t.scene.c_str(), to_string(t.task).c_str(),
                    to_string(t.condition).c_str(), t.policy_a.c_str(), t.policy_b.c_str(),
                    t.U, t.p, t.stars.c_str());
      out << line;
    }
  }
  for (const std::string& note : report.missing) {
    out << "note: " << note << "\n";
  }
  return out.str();
}

std::string report_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "policy,scene,task,condition,metric,value,sd,trials\n";
  for (const auto& [key, agg] : report.cells) {
    const std::string prefix = key.policy + "," + key.scene + "," + to_string(key.task) +
                               "," + to_string(key.condition) + ",";
    out << prefix << "success_rate," << agg.success_rate << ",," << agg.trials << "\n";
    out << prefix << "comfort_rate," << agg.comfort_rate << ",," << agg.trials << "\n";
    out << prefix << "min_distance," << agg.mean_min_distance << "," << agg.sd_min_distance
        << "," << agg.trials << "\n";
    out << prefix << "path_length," << agg.mean_path_length << "," << agg.sd_path_length
        << "," << agg.trials << "\n";
  }
  return out.str();
}

std::string tests_csv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "metric,scene,task,condition,policy_a,policy_b,U,p,stars\n";
  for (const PairwiseTest& t : report.tests) {
    out << t.metric << "," << t.scene << "," << to_string(t.task) << ","
        << to_string(t.condition) << "," << t.policy_a << "," << t.policy_b << "," << t.U
        << "," << t.p << "," << t.stars << "\n";
  }
  return out.str();
}

}  // namespace gmpc
