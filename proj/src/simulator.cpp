#include "gmpc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace gmpc {

std::string to_string(Task t) { return t == Task::Flow ? "flow" : "cross"; }
std::string to_string(Condition c) { return c == Condition::Offline ? "offline" : "online"; }
std::string to_string(Perception p) {
  return p == Perception::GroundTruth ? "ground_truth" : "lidar";
}
std::string to_string(Termination t) {
  switch (t) {
    case Termination::Success: return "success";
    case Termination::Collision: return "collision";
    case Termination::Timeout: return "timeout";
  }
  return "unknown";
}

Task task_from_string(const std::string& s) {
  if (s == "flow") return Task::Flow;
  if (s == "cross") return Task::Cross;
  throw std::invalid_argument("unknown task: " + s);
}
Condition condition_from_string(const std::string& s) {
  if (s == "offline") return Condition::Offline;
  if (s == "online") return Condition::Online;
  throw std::invalid_argument("unknown condition: " + s);
}
Perception perception_from_string(const std::string& s) {
  if (s == "ground_truth") return Perception::GroundTruth;
  if (s == "lidar") return Perception::Lidar;
  throw std::invalid_argument("unknown perception: " + s);
}
Termination termination_from_string(const std::string& s) {
  if (s == "success") return Termination::Success;
  if (s == "collision") return Termination::Collision;
  if (s == "timeout") return Termination::Timeout;
  throw std::invalid_argument("unknown termination: " + s);
}

std::vector<TrialSpec> extract_trials(const std::vector<WorldSnapshot>& snapshots,
                                      const std::string& scene, const TestRegion& region,
                                      const Vec2& start, const Vec2& goal, Task task,
                                      int min_peds, int min_len) {
  std::vector<TrialSpec> trials;
  int run_begin = -1;
  auto close_run = [&](int run_end) {
    if (run_begin < 0) return;
    if (run_end - run_begin + 1 >= min_len) {
      TrialSpec spec;
      spec.scene = scene;
      spec.task = task;
      spec.start = start;
      spec.goal = goal;
      spec.segment_begin = run_begin;
      spec.segment_end = run_end;
      spec.id = scene + "_" + to_string(task) + "_" + std::to_string(trials.size());
      trials.push_back(std::move(spec));
    }
    run_begin = -1;
  };

  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    int inside = 0;
    for (const AugmentedAgentState& a : snapshots[k].agents) {
      inside += region.contains(a.position);
    }
    if (inside >= min_peds) {
      if (run_begin < 0) run_begin = static_cast<int>(k);
    } else {
      close_run(static_cast<int>(k) - 1);
    }
  }
  close_run(static_cast<int>(snapshots.size()) - 1);
  return trials;
}

int default_timeout_steps(double straight_line_distance, double v_max, double dt,
                          double factor) {
  const int steps =
      static_cast<int>(std::ceil(factor * straight_line_distance / (v_max * dt)));
  return std::max(1, steps);
}

namespace {

/// Ground-truth pedestrian source for one trial, replayed or ORCA-driven.
class WorldDriver {
 public:
  WorldDriver(const TrialSpec& spec, const std::vector<WorldSnapshot>& scene,
              const SimConfigs& cfgs)
      : spec_(spec), scene_(scene), cfgs_(cfgs) {
    if (spec.condition == Condition::Online) {
      index_recording();
      // Agents already in the scene at the segment start.
      spawn_for_step(0, /*initial=*/true);
    }
  }

  /// Ground-truth agent states at trial step k (0 = trial start).
  std::vector<AugmentedAgentState> states(int k) const {
    if (spec_.condition == Condition::Offline) {
      const int idx = spec_.segment_begin + k;
      if (idx >= static_cast<int>(scene_.size())) return {};
      const WorldSnapshot& curr = scene_[idx];
      if (idx == 0) {
        return extract_augmented_states(curr, curr, cfgs_.world.dt);
      }
      return extract_augmented_states(scene_[idx - 1], curr, cfgs_.world.dt);
    }
    std::vector<AugmentedAgentState> out;
    out.reserve(orca_agents_.size());
    for (const OrcaAgent& a : orca_agents_) {
      AugmentedAgentState st;
      st.id = a.id;
      st.position = a.position;
      st.velocity = a.velocity;
      st.speed = a.velocity.norm();
      st.heading =
          st.speed > 0.0 ? wrap_heading(std::atan2(a.velocity.y(), a.velocity.x())) : 0.0;
      out.push_back(st);
    }
    return out;
  }

  /// Advances the pedestrians from step k to k+1. The robot pose/velocity are
  /// those at the moment the pedestrians decide (simultaneous update).
  void advance(int k, const Vec2& robot_pos, const Vec2& robot_vel) {
    if (spec_.condition == Condition::Offline) return;  // replay is index-based
    OrcaAgent robot;
    robot.id = -1;
    robot.position = robot_pos;
    robot.velocity = robot_vel;
    robot.radius = std::max(cfgs_.world.robot_radius, cfgs_.orca.agent_radius);
    robot.max_speed = cfgs_.world.v_max;
    orca_agents_ = step_orca_agents(orca_agents_, robot, cfgs_.world.dt, cfgs_.orca);
    spawn_for_step(k + 1, /*initial=*/false);
  }

 private:
  void index_recording() {
    for (int idx = 0; idx < static_cast<int>(scene_.size()); ++idx) {
      for (const AugmentedAgentState& a : scene_[idx].agents) {
        auto [it, inserted] = presence_.try_emplace(a.id);
        Presence& p = it->second;
        if (inserted) p.first_step = idx;
        if (idx > p.last_step && p.last_step >= 0) {
          p.path_length += (a.position - p.last_pos).norm();
        }
        p.last_step = idx;
        p.last_pos = a.position;
      }
    }
  }

  void spawn_for_step(int k, bool initial) {
    const int idx = spec_.segment_begin + k;
    if (idx >= static_cast<int>(scene_.size())) return;
    for (const AugmentedAgentState& a : scene_[idx].agents) {
      const Presence& p = presence_.at(a.id);
      const bool due = initial ? (p.first_step <= idx && p.last_step >= idx)
                               : p.first_step == idx;
      if (!due || spawned_.count(a.id)) continue;
      spawned_.insert(a.id);
      if (p.last_step <= idx) continue;  // exits immediately; nothing to drive

      OrcaAgent agent;
      agent.id = a.id;
      agent.position = a.position;
      agent.goal = p.last_pos;
      const double duration = (p.last_step - p.first_step) * cfgs_.world.dt;
      agent.pref_speed =
          duration > 0.0 ? std::clamp(p.path_length / duration, 0.3, 2.5) : 0.3;
      agent.radius = cfgs_.orca.agent_radius;
      agent.max_speed = cfgs_.orca.max_speed_factor * agent.pref_speed;
      // Initial velocity from the recording.
      const int prev = spec_.segment_begin + k - 1;
      if (prev >= 0) {
        for (const AugmentedAgentState& b : scene_[prev].agents) {
          if (b.id == a.id) {
            agent.velocity = (a.position - b.position) / cfgs_.world.dt;
            break;
          }
        }
      }
      orca_agents_.push_back(agent);
    }
  }

  struct Presence {
    int first_step = -1;
    int last_step = -1;
    Vec2 last_pos = Vec2::Zero();
    double path_length = 0.0;
  };

  const TrialSpec& spec_;
  const std::vector<WorldSnapshot>& scene_;
  const SimConfigs& cfgs_;
  std::vector<OrcaAgent> orca_agents_;
  std::map<int, Presence> presence_;
  std::set<int> spawned_;
};

WorldSnapshot make_snapshot(int step, const Vec2& robot,
                            const std::vector<AugmentedAgentState>& agents) {
  WorldSnapshot snap;
  snap.time_index = step;
  snap.robot = {-1, robot};
  snap.agents = agents;
  return snap;
}

double min_agent_distance(const Vec2& robot, const std::vector<AugmentedAgentState>& agents) {
  double best = std::numeric_limits<double>::infinity();
  for (const AugmentedAgentState& a : agents) {
    best = std::min(best, (robot - a.position).norm());
  }
  return best;
}

}  // namespace

TrialRecord run_trial(const TrialSpec& spec, const std::vector<WorldSnapshot>& scene,
                      const SimConfigs& cfgs, unsigned seed,
                      const ExternalForecastStore* external) {
  if (spec.segment_begin < 0 || spec.segment_begin >= static_cast<int>(scene.size())) {
    throw std::invalid_argument("run_trial: segment outside the scene");
  }
  if ((spec.start - spec.goal).norm() < 1e-9) {
    throw std::invalid_argument("run_trial: start equals goal");
  }

  TrialRecord record;
  record.spec = spec;
  record.policy = to_string(cfgs.planner.policy);
  record.effective_lambda = cfgs.planner.lambda;
  record.seed = seed;
  record.timeout_steps =
      cfgs.world.timeout_steps > 0
          ? cfgs.world.timeout_steps
          : default_timeout_steps((spec.goal - spec.start).norm(), cfgs.world.v_max,
                                  cfgs.world.dt);

  WorldDriver driver(spec, scene, cfgs);
  std::mt19937 rng(seed);

  Vec2 robot = spec.start;
  Vec2 robot_vel = Vec2::Zero();
  double robot_heading =
      wrap_heading(std::atan2((spec.goal - spec.start).y(), (spec.goal - spec.start).x()));

  std::deque<std::vector<AugmentedAgentState>> history;
  std::vector<AugmentedAgentState> prev_detections;
  int next_track_id = 0;

  std::vector<AugmentedAgentState> truth = driver.states(0);
  record.robot_trace.push_back(robot);
  record.snapshots.push_back(make_snapshot(0, robot, truth));
  record.termination = Termination::Timeout;

  if ((robot - spec.goal).norm() <= cfgs.world.goal_radius) {
    record.termination = Termination::Success;
    return record;
  }

  for (int step = 0; step < record.timeout_steps; ++step) {
    // Perceive.
    std::vector<AugmentedAgentState> perceived;
    if (spec.perception == Perception::GroundTruth) {
      perceived = truth;
    } else {
      const LidarScan scan = simulate_lidar(truth, robot, robot_heading, cfgs.lidar, rng);
      perceived =
          detect_pedestrians(scan, prev_detections, cfgs.world.dt, next_track_id, cfgs.lidar);
      prev_detections = perceived;
    }
    history.push_back(std::move(perceived));
    while (history.size() > static_cast<std::size_t>(cfgs.oracle.history_len)) {
      history.pop_front();
    }

    // Plan.
    PlanInput input;
    input.history.assign(history.begin(), history.end());
    input.robot = robot;
    input.goal = spec.goal;
    OracleContext ctx;
    ctx.trial_id = spec.id;
    ctx.step = step;
    ctx.external = external;
    const PlanResult result =
        plan(input, cfgs.planner, cfgs.grouping, cfgs.oracle, cfgs.world,
             external != nullptr ? &ctx : nullptr);

    // Execute the first control; pedestrians move simultaneously.
    const Vec2 control = result.best.controls.front();
    driver.advance(step, robot, robot_vel);
    robot += control * cfgs.world.dt;
    robot_vel = control;
    if (control.norm() > 1e-9) {
      robot_heading = wrap_heading(std::atan2(control.y(), control.x()));
    }

    truth = driver.states(step + 1);
    record.robot_trace.push_back(robot);
    record.snapshots.push_back(make_snapshot(step + 1, robot, truth));

    if (min_agent_distance(robot, truth) < cfgs.world.collision_distance) {
      record.termination = Termination::Collision;
      break;
    }
    if ((robot - spec.goal).norm() <= cfgs.world.goal_radius) {
      record.termination = Termination::Success;
      break;
    }
  }
  return record;
}

}  // namespace gmpc
