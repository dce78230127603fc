#pragma once

#include "gmpc/geometry.hpp"
#include "gmpc/world.hpp"

#include <unordered_map>
#include <vector>

namespace gmpc {

struct GroupingConfig {
  double eps_s = 2.0;                      // meters
  double eps_theta = 30.0 * 0.017453292519943295;  // radians
  double eps_v = 1.0;                      // m/s
  double C = 0.35;                         // personal-space scale
  double C_min = 0.05;
  double C_step = 0.1;
  int boundary_samples = 64;
};

struct Group {
  int label = 0;
  std::vector<int> members;  // sorted agent ids
};

/// Asymmetric personal-space boundary, elongated ahead in proportion to speed.
struct PersonalSpace {
  int agent_id = -1;
  std::vector<Vec2> boundary;  // samples at phi_k = 2*pi*k/n, ordered by phi
  double sigma_f = 0.0;
  double sigma_s = 0.0;
  double sigma_r = 0.0;
};

struct GroupSpace {
  int label = 0;
  Polygon polygon;  // convex, counterclockwise
  std::vector<int> member_ids;
};

struct GroupSpaceSequence {
  int label = 0;
  std::vector<GroupSpace> spaces;  // contiguous time indices, oldest first
};

/// True if the two agents are neighbors under the clustering thresholds:
/// close in position, circular heading, and speed simultaneously.
bool agents_are_neighbors(const AugmentedAgentState& a, const AugmentedAgentState& b,
                          const GroupingConfig& cfg);

/// Density clustering with minPts = 1: groups are the connected components of
/// the neighbor relation, so isolated agents form singleton groups. Labels are
/// assigned in order of each group's smallest member id.
std::vector<Group> cluster_groups(const std::vector<AugmentedAgentState>& states,
                                  const GroupingConfig& cfg);

/// Forward/side/rear extents of the personal space for a given speed.
void personal_space_sigmas(double speed, double& sigma_f, double& sigma_s,
                           double& sigma_r);

/// Boundary radius at body-relative angle phi for scale C.
double personal_space_radius(double phi, double speed, double C);

PersonalSpace personal_space(const AugmentedAgentState& q, double C, int boundary_samples);

/// Convex hull over the boundary samples of all member personal spaces.
/// Degenerate hulls are inflated to a tiny triangle.
GroupSpace group_space(const Group& group,
                       const std::unordered_map<int, AugmentedAgentState>& states,
                       double C, int boundary_samples);

std::vector<GroupSpace> group_spaces(const std::vector<Group>& groups,
                                     const std::vector<AugmentedAgentState>& states,
                                     double C, int boundary_samples);

struct ShrinkResult {
  std::vector<GroupSpace> spaces;
  double effective_C = 0.0;
};

/// While the robot is strictly inside any group polygon, reduce C by C_step
/// (floored at C_min) and rebuild all spaces. At C_min the spaces are returned
/// as-is even if the robot is still inside.
ShrinkResult shrink_until_outside(std::vector<GroupSpace> spaces, const Vec2& robot,
                                  const std::vector<Group>& groups,
                                  const std::vector<AugmentedAgentState>& states,
                                  const GroupingConfig& cfg);

/// Per-agent observed states over the history window, oldest first, aligned so
/// that the last entry is the current step. Shorter vectors mean the agent
/// entered the scene recently.
using AgentHistories = std::unordered_map<int, std::vector<AugmentedAgentState>>;

/// Builds an h-step group-space history for each current group. Members with
/// partial histories are extended backward by constant-velocity propagation
/// from their earliest known state; past membership follows the current group.
std::vector<GroupSpaceSequence> complete_group_history(
    const std::vector<Group>& current_groups, const AgentHistories& histories, int h,
    double dt, double C, int boundary_samples);

std::unordered_map<int, AugmentedAgentState> index_by_id(
    const std::vector<AugmentedAgentState>& states);

}  // namespace gmpc
