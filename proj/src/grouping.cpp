#include "gmpc/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace gmpc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

}  // namespace

bool agents_are_neighbors(const AugmentedAgentState& a, const AugmentedAgentState& b,
                          const GroupingConfig& cfg) {
  if ((a.position - b.position).norm() > cfg.eps_s) return false;
  if (heading_distance(a.heading, b.heading) > cfg.eps_theta) return false;
  return std::fabs(a.speed - b.speed) <= cfg.eps_v;
}

std::vector<Group> cluster_groups(const std::vector<AugmentedAgentState>& states,
                                  const GroupingConfig& cfg) {
  if (states.empty()) throw std::invalid_argument("cluster_groups: no agents");

  const std::size_t n = states.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (agents_are_neighbors(states[i], states[j], cfg)) uf.unite(i, j);
    }
  }

  std::unordered_map<std::size_t, std::vector<int>> components;
  for (std::size_t i = 0; i < n; ++i) {
    components[uf.find(i)].push_back(states[i].id);
  }

  std::vector<Group> groups;
  groups.reserve(components.size());
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end());
    groups.push_back({0, std::move(members)});
  }
  std::sort(groups.begin(), groups.end(),
            [](const Group& a, const Group& b) { return a.members.front() < b.members.front(); });
  for (std::size_t g = 0; g < groups.size(); ++g) {
    groups[g].label = static_cast<int>(g);
  }
  return groups;
}

void personal_space_sigmas(double speed, double& sigma_f, double& sigma_s,
                           double& sigma_r) {
  sigma_f = std::max(2.0 * speed, 0.5);
  sigma_s = 2.0 * sigma_f / 3.0;
  sigma_r = sigma_f / 2.0;
}

double personal_space_radius(double phi, double speed, double C) {
  double sigma_f, sigma_s, sigma_r;
  personal_space_sigmas(speed, sigma_f, sigma_s, sigma_r);

  double s1, s2;
  if (phi < kHalfPi) {
    s1 = sigma_f;
    s2 = sigma_s;
  } else if (phi < kPi) {
    s1 = sigma_s;
    s2 = sigma_r;
  } else if (phi < 3.0 * kHalfPi) {
    s1 = sigma_r;
    s2 = sigma_s;
  } else {
    s1 = sigma_s;
    s2 = sigma_f;
  }
  const double gamma = std::fmod(phi, kHalfPi);
  const double c = std::cos(gamma);
  const double s = std::sin(gamma);
  return std::sqrt(C / (c * c / (2.0 * s1) + s * s / (2.0 * s2)));
}

PersonalSpace personal_space(const AugmentedAgentState& q, double C, int boundary_samples) {
  if (C <= 0.0) throw std::invalid_argument("personal_space: C must be positive");
  if (boundary_samples < 8) throw std::invalid_argument("personal_space: too few samples");

  PersonalSpace ps;
  ps.agent_id = q.id;
  personal_space_sigmas(q.speed, ps.sigma_f, ps.sigma_s, ps.sigma_r);
  ps.boundary.reserve(boundary_samples);
  for (int k = 0; k < boundary_samples; ++k) {
    const double phi = 2.0 * kPi * k / boundary_samples;
    const double r = personal_space_radius(phi, q.speed, C);
    const double ang = q.heading + phi;
    ps.boundary.push_back(q.position + r * Vec2(std::cos(ang), std::sin(ang)));
  }
  return ps;
}

GroupSpace group_space(const Group& group,
                       const std::unordered_map<int, AugmentedAgentState>& states,
                       double C, int boundary_samples) {
  std::vector<Vec2> samples;
  samples.reserve(group.members.size() * boundary_samples);
  for (int id : group.members) {
    auto it = states.find(id);
    if (it == states.end()) {
      throw std::invalid_argument("group_space: member " + std::to_string(id) +
                                  " missing from states");
    }
    const PersonalSpace ps = personal_space(it->second, C, boundary_samples);
    samples.insert(samples.end(), ps.boundary.begin(), ps.boundary.end());
  }
  GroupSpace gs;
  gs.label = group.label;
  gs.member_ids = group.members;
  gs.polygon = inflate_degenerate(convex_hull(std::move(samples)));
  return gs;
}

std::vector<GroupSpace> group_spaces(const std::vector<Group>& groups,
                                     const std::vector<AugmentedAgentState>& states,
                                     double C, int boundary_samples) {
  const auto by_id = index_by_id(states);
  std::vector<GroupSpace> out;
  out.reserve(groups.size());
  for (const Group& g : groups) {
    out.push_back(group_space(g, by_id, C, boundary_samples));
  }
  return out;
}

ShrinkResult shrink_until_outside(std::vector<GroupSpace> spaces, const Vec2& robot,
                                  const std::vector<Group>& groups,
                                  const std::vector<AugmentedAgentState>& states,
                                  const GroupingConfig& cfg) {
  auto robot_inside = [&robot](const std::vector<GroupSpace>& sp) {
    for (const GroupSpace& g : sp) {
      if (signed_distance(robot, g.polygon) < 0.0) return true;
    }
    return false;
  };

  double C = cfg.C;
  while (robot_inside(spaces) && C > cfg.C_min + 1e-12) {
    C = std::max(C - cfg.C_step, cfg.C_min);
    spaces = group_spaces(groups, states, C, cfg.boundary_samples);
  }
  return {std::move(spaces), C};
}

std::vector<GroupSpaceSequence> complete_group_history(
    const std::vector<Group>& current_groups, const AgentHistories& histories, int h,
    double dt, double C, int boundary_samples) {
  if (h < 1) throw std::invalid_argument("complete_group_history: h must be >= 1");

  // Completed per-agent windows: h states, oldest first.
  std::unordered_map<int, std::vector<AugmentedAgentState>> completed;
  for (const Group& g : current_groups) {
    for (int id : g.members) {
      auto it = histories.find(id);
      if (it == histories.end() || it->second.empty()) {
        throw std::invalid_argument("complete_group_history: agent " +
                                    std::to_string(id) + " has no observed state");
      }
      const std::vector<AugmentedAgentState>& obs = it->second;
      std::vector<AugmentedAgentState> window;
      window.reserve(h);
      const std::size_t take = std::min<std::size_t>(obs.size(), h);
      window.assign(obs.end() - take, obs.end());
      // Back-propagate from the earliest known state at its velocity.
      const AugmentedAgentState earliest = window.front();
      while (window.size() < static_cast<std::size_t>(h)) {
        AugmentedAgentState synth = earliest;
        const int steps_back = static_cast<int>(window.size() + 1 - take);
        synth.position = earliest.position - steps_back * dt * earliest.velocity;
        window.insert(window.begin(), synth);
      }
      completed[id] = std::move(window);
    }
  }

  std::vector<GroupSpaceSequence> sequences;
  sequences.reserve(current_groups.size());
  for (const Group& g : current_groups) {
    GroupSpaceSequence seq;
    seq.label = g.label;
    seq.spaces.reserve(h);
    for (int tau = 0; tau < h; ++tau) {
      std::unordered_map<int, AugmentedAgentState> frame_states;
      for (int id : g.members) {
        frame_states[id] = completed[id][tau];
      }
      seq.spaces.push_back(group_space(g, frame_states, C, boundary_samples));
    }
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

std::unordered_map<int, AugmentedAgentState> index_by_id(
    const std::vector<AugmentedAgentState>& states) {
  std::unordered_map<int, AugmentedAgentState> map;
  map.reserve(states.size());
  for (const AugmentedAgentState& s : states) map[s.id] = s;
  return map;
}

}  // namespace gmpc
