#include "gmpc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gmpc {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::PedNoPred: return "ped-nopred";
    case PolicyKind::PedLinear: return "ped-linear";
    case PolicyKind::GroupNoPred: return "group-nopred";
    case PolicyKind::GroupPred: return "group-pred";
  }
  return "unknown";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "ped-nopred") return PolicyKind::PedNoPred;
  if (name == "ped-linear") return PolicyKind::PedLinear;
  if (name == "group-nopred") return PolicyKind::GroupNoPred;
  if (name == "group-pred") return PolicyKind::GroupPred;
  throw std::invalid_argument("unknown policy: " + name);
}

std::vector<Vec2> rollout_states(const ControlRollout& rollout, const Vec2& start,
                                 double dt) {
  std::vector<Vec2> states;
  states.reserve(rollout.controls.size() + 1);
  states.push_back(start);
  for (const Vec2& u : rollout.controls) {
    states.push_back(states.back() + u * dt);
  }
  return states;
}

std::vector<ControlRollout> generate_rollouts(const PlannerConfig& cfg, double v_max,
                                              double dt) {
  if (cfg.directions < 4) throw std::invalid_argument("generate_rollouts: R too small");
  std::vector<ControlRollout> rollouts;
  rollouts.reserve(static_cast<std::size_t>(cfg.directions) * cfg.speed_fractions.size() *
                   cfg.turn_rates.size());
  for (int r = 0; r < cfg.directions; ++r) {
    const double psi = 2.0 * std::numbers::pi * r / cfg.directions;
    for (double frac : cfg.speed_fractions) {
      const double v = frac * v_max;
      for (double omega : cfg.turn_rates) {
        ControlRollout rollout;
        rollout.direction = psi;
        rollout.speed = v;
        rollout.turn_rate = omega;
        rollout.controls.reserve(cfg.horizon);
        for (int k = 1; k <= cfg.horizon; ++k) {
          const double ang = psi + omega * (k - 1) * dt;
          rollout.controls.push_back(v * Vec2(std::cos(ang), std::sin(ang)));
        }
        rollouts.push_back(std::move(rollout));
      }
    }
  }
  return rollouts;
}

namespace {

bool inside_any(const Vec2& p, const std::vector<Polygon>& polygons) {
  for (const Polygon& poly : polygons) {
    if (signed_distance(p, poly) < 0.0) return true;
  }
  return false;
}

/// Minimum boundary distance over all polygons, negated if p is inside one.
double min_obstacle_distance(const Vec2& p, const std::vector<Polygon>& polygons) {
  double best = std::numeric_limits<double>::infinity();
  bool inside = false;
  for (const Polygon& poly : polygons) {
    const double sd = signed_distance(p, poly);
    inside = inside || sd < 0.0;
    best = std::min(best, std::fabs(sd));
  }
  return inside ? -best : best;
}

}  // namespace

std::vector<double> cost_goal(const std::vector<Vec2>& states,
                              const ForecastFrames& forecast, const Vec2& goal) {
  const std::size_t K = states.size() - 1;
  std::vector<double> costs(K);
  // Waypoints inside a forecast polygon make no goal progress: the charge
  // freezes at the last collision-free waypoint, so penetrating an obstacle
  // is never rewarded.
  Vec2 last_free = states[0];
  for (std::size_t k = 1; k <= K; ++k) {
    const Vec2& waypoint = states[k];
    const bool colliding =
        k - 1 < forecast.size() && inside_any(waypoint, forecast[k - 1]);
    if (!colliding) last_free = waypoint;
    costs[k - 1] = (last_free - goal).norm();
  }
  return costs;
}

std::vector<double> cost_proximity(const std::vector<Vec2>& states,
                                   const ForecastFrames& forecast) {
  const std::size_t K = states.size() - 1;
  std::vector<double> costs(K);
  for (std::size_t k = 1; k <= K; ++k) {
    if (k - 1 >= forecast.size() || forecast[k - 1].empty()) {
      costs[k - 1] = 0.0;
      continue;
    }
    const double d = min_obstacle_distance(states[k], forecast[k - 1]);
    costs[k - 1] = std::exp(-d);
  }
  return costs;
}

double total_cost(const std::vector<Vec2>& states, const ForecastFrames& forecast,
                  const Vec2& goal, const PlannerConfig& cfg) {
  const std::vector<double> jg = cost_goal(states, forecast, goal);
  const std::vector<double> jd = cost_proximity(states, forecast);
  double cost = 0.0;
  double discount = 1.0;
  for (std::size_t k = 0; k < jg.size(); ++k) {
    discount *= cfg.gamma;
    cost += discount * (cfg.lambda * jg[k] + (1.0 - cfg.lambda) * jd[k]);
  }
  return cost;
}

namespace {

/// Personal-space polygons, one per agent, as singleton obstacle hulls.
std::vector<Polygon> pedestrian_polygons(const std::vector<AugmentedAgentState>& states,
                                         double C, int samples) {
  std::vector<Polygon> polys;
  polys.reserve(states.size());
  for (const AugmentedAgentState& q : states) {
    const PersonalSpace ps = personal_space(q, C, samples);
    polys.push_back(inflate_degenerate(convex_hull(ps.boundary)));
  }
  return polys;
}

struct ObstacleForecast {
  ForecastFrames frames;
  double effective_C;
};

ObstacleForecast build_forecast(const PlanInput& input, const PlannerConfig& planner,
                                const GroupingConfig& grouping, const OracleConfig& oracle,
                                const WorldConfig& world, const OracleContext* ctx) {
  const int K = planner.horizon;
  ObstacleForecast out;
  out.effective_C = grouping.C;
  out.frames.assign(K, {});
  if (input.history.empty() || input.history.back().empty()) return out;

  const std::vector<AugmentedAgentState>& current = input.history.back();
  const bool group_based = planner.policy == PolicyKind::GroupNoPred ||
                           planner.policy == PolicyKind::GroupPred;

  std::vector<Group> groups;
  if (group_based) groups = cluster_groups(current, grouping);

  // Current-time obstacle set at a given scale, used by the shrink rule.
  auto obstacles_now = [&](double C) {
    if (group_based) {
      std::vector<Polygon> polys;
      for (const GroupSpace& gs : group_spaces(groups, current, C, grouping.boundary_samples)) {
        polys.push_back(gs.polygon);
      }
      return polys;
    }
    return pedestrian_polygons(current, C, grouping.boundary_samples);
  };

  double C = grouping.C;
  while (inside_any(input.robot, obstacles_now(C)) && C > grouping.C_min + 1e-12) {
    C = std::max(C - grouping.C_step, grouping.C_min);
  }
  out.effective_C = C;

  switch (planner.policy) {
    case PolicyKind::PedNoPred: {
      const std::vector<Polygon> now = obstacles_now(C);
      out.frames.assign(K, now);
      break;
    }
    case PolicyKind::PedLinear: {
      const std::vector<Polygon> now = obstacles_now(C);
      for (int k = 1; k <= K; ++k) {
        for (std::size_t i = 0; i < now.size(); ++i) {
          out.frames[k - 1].push_back(
              translated(now[i], k * world.dt * current[i].velocity));
        }
      }
      break;
    }
    case PolicyKind::GroupNoPred: {
      const std::vector<Polygon> now = obstacles_now(C);
      out.frames.assign(K, now);
      break;
    }
    case PolicyKind::GroupPred: {
      AgentHistories histories;
      for (const auto& step : input.history) {
        for (const AugmentedAgentState& a : step) histories[a.id].push_back(a);
      }
      OracleConfig effective = oracle;
      effective.horizon = K;
      const auto sequences = complete_group_history(
          groups, histories, oracle.history_len, world.dt, C, grouping.boundary_samples);
      for (const GroupSpaceSequence& seq : sequences) {
        const GroupSpaceSequence forecast = predict(seq, effective, ctx);
        for (int k = 0; k < K; ++k) {
          out.frames[k].push_back(forecast.spaces[k].polygon);
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace

PlanResult plan(const PlanInput& input, const PlannerConfig& planner,
                const GroupingConfig& grouping, const OracleConfig& oracle,
                const WorldConfig& world, const OracleContext* ctx) {
  ObstacleForecast forecast =
      build_forecast(input, planner, grouping, oracle, world, ctx);

  const std::vector<ControlRollout> rollouts =
      generate_rollouts(planner, world.v_max, world.dt);

  PlanResult result;
  result.effective_C = forecast.effective_C;
  result.per_rollout_costs.reserve(rollouts.size());
  std::size_t best_index = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    const std::vector<Vec2> states = rollout_states(rollouts[i], input.robot, world.dt);
    const double cost = total_cost(states, forecast.frames, input.goal, planner);
    result.per_rollout_costs.push_back(cost);
    if (cost < best_cost) {
      best_cost = cost;
      best_index = i;
    }
  }
  result.best = rollouts[best_index];
  result.best_states = rollout_states(result.best, input.robot, world.dt);
  result.cost = best_cost;
  result.forecast = std::move(forecast.frames);
  return result;
}

}  // namespace gmpc
