#pragma once

#include "gmpc/grouping.hpp"
#include "gmpc/prediction.hpp"
#include "gmpc/world.hpp"

#include <array>
#include <string>
#include <vector>

namespace gmpc {

enum class PolicyKind { PedNoPred, PedLinear, GroupNoPred, GroupPred };

std::string to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);

struct PlannerConfig {
  double lambda = 0.65;  // goal-vs-proximity weight in [0, 1]
  double gamma = 1.0;    // per-step discount in (0, 1]
  int horizon = 8;       // K, equal to the oracle horizon f
  int directions = 12;   // R
  std::array<double, 3> speed_fractions{1.0 / 3.0, 2.0 / 3.0, 1.0};
  std::array<double, 3> turn_rates{0.0, 1.5707963267948966, -1.5707963267948966};
  PolicyKind policy = PolicyKind::GroupPred;
};

/// One candidate control trajectory: constant speed v along an initial
/// direction psi, with the direction rotating at omega during the rollout.
struct ControlRollout {
  double direction = 0.0;  // psi, radians
  double speed = 0.0;      // m/s
  double turn_rate = 0.0;  // omega, rad/s
  std::vector<Vec2> controls;  // K velocity vectors, |u_k| = v
};

/// Integrates s_{k+1} = s_k + u_k * dt from the start; returns K+1 positions.
std::vector<Vec2> rollout_states(const ControlRollout& rollout, const Vec2& start,
                                 double dt);

/// The full candidate family: R directions x 3 speeds x 3 turn rates, ordered
/// by direction index, then speed ascending, then turn rate (0, +, -).
std::vector<ControlRollout> generate_rollouts(const PlannerConfig& cfg, double v_max,
                                              double dt);

/// Obstacle polygons per future step: frames[k] applies to the waypoint k+1
/// steps ahead of the current state.
using ForecastFrames = std::vector<std::vector<Polygon>>;

/// Per-step goal cost: the distance of the last collision-free waypoint to
/// the goal. Steps whose waypoint sits inside an obstacle polygon inherit the
/// frozen distance of the preceding free waypoint.
std::vector<double> cost_goal(const std::vector<Vec2>& states,
                              const ForecastFrames& forecast, const Vec2& goal);

/// Per-step proximity cost exp(-D), where D is the minimum distance to any
/// obstacle polygon, negated when the waypoint is inside one. No obstacles
/// means zero cost.
std::vector<double> cost_proximity(const std::vector<Vec2>& states,
                                   const ForecastFrames& forecast);

/// Discounted weighted sum over the horizon:
///   sum_k gamma^k [lambda J_g + (1 - lambda) J_d].
double total_cost(const std::vector<Vec2>& states, const ForecastFrames& forecast,
                  const Vec2& goal, const PlannerConfig& cfg);

struct PlanInput {
  /// Perceived agent states per step, oldest first; back() is the current
  /// step. Length is clamped to the oracle history window.
  std::vector<std::vector<AugmentedAgentState>> history;
  Vec2 robot = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
};

struct PlanResult {
  ControlRollout best;
  std::vector<Vec2> best_states;  // K+1 positions from the robot state
  double cost = 0.0;
  std::vector<double> per_rollout_costs;
  double effective_C = 0.0;
  ForecastFrames forecast;  // obstacle set actually scored against
};

/// Builds the policy's obstacle forecast from the perceived history (group or
/// per-pedestrian spaces, with or without prediction), applies the C-shrinking
/// rule when the robot starts inside an obstacle, then scores every candidate
/// rollout and returns the argmin (first in rollout order on ties).
PlanResult plan(const PlanInput& input, const PlannerConfig& planner,
                const GroupingConfig& grouping, const OracleConfig& oracle,
                const WorldConfig& world, const OracleContext* ctx = nullptr);

}  // namespace gmpc
