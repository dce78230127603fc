#pragma once

#include "gmpc/geometry.hpp"

#include <optional>
#include <vector>

namespace gmpc {

struct OrcaConfig {
  double neighbor_dist = 10.0;   // meters
  double time_horizon = 2.0;     // seconds
  double agent_radius = 0.3;     // meters
  double exit_radius = 0.3;      // agents are removed this close to their goal
  double max_speed_factor = 1.5; // max speed relative to preferred speed
};

struct OrcaAgent {
  int id = -1;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 goal = Vec2::Zero();
  double pref_speed = 1.2;
  double radius = 0.3;
  double max_speed = 1.8;
};

/// Velocity that stays closest to the preferred velocity subject to the ORCA
/// half-plane constraints against the given neighbors. Constraints from
/// neighbors marked non-reciprocal (the robot) take the full avoidance effort.
Vec2 orca_velocity(const OrcaAgent& agent, const Vec2& preferred,
                   const std::vector<const OrcaAgent*>& neighbors,
                   const std::vector<bool>& reciprocal, double dt,
                   const OrcaConfig& cfg);

/// Advances all agents one step: preferred velocities point at each agent's
/// goal at its preferred speed, new velocities come from the reciprocal
/// half-plane solve, positions integrate at dt. The robot, when present, is
/// treated as an agent-shaped obstacle the pedestrians must avoid on their
/// own. Agents within exit_radius of their goal are removed.
std::vector<OrcaAgent> step_orca_agents(const std::vector<OrcaAgent>& agents,
                                        const std::optional<OrcaAgent>& robot, double dt,
                                        const OrcaConfig& cfg);

}  // namespace gmpc
