#pragma once

#include "gmpc/geometry.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmpc {

struct WorldConfig {
  double dt = 0.1;                  // seconds per control step
  double v_max = 1.75;              // robot speed cap, m/s
  double robot_radius = 0.0;        // point robot
  double collision_distance = 0.5;  // robot-pedestrian center distance
  double goal_radius = 0.5;         // goal-reached radius
  int timeout_steps = 1000;
};

struct AgentState {
  int id = -1;
  Vec2 position = Vec2::Zero();
};

/// Agent position plus motion attributes derived by finite differencing.
/// Heading lies in [0, 2pi) and is aligned with the velocity when moving.
struct AugmentedAgentState {
  int id = -1;
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
  double speed = 0.0;
  Vec2 velocity = Vec2::Zero();
};

struct WorldSnapshot {
  int time_index = 0;
  AgentState robot;
  std::vector<AugmentedAgentState> agents;
};

/// One annotated frame of a recording: frame id plus agent positions.
struct RecordingFrame {
  long frame_id = 0;
  std::vector<AgentState> agents;
};

struct Recording {
  double frame_interval = 0.4;  // seconds between consecutive annotated frames
  std::string scene_name;
  std::vector<RecordingFrame> frames;  // frame ids strictly increasing
};

enum class DatasetFormat {
  FramePedXY,  // rows: frame_id ped_id x y
  Obsmat,      // rows: frame_id ped_id x z y vx vz vy (x, y taken from cols 3 and 5)
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line_no)
      : std::runtime_error(msg), line(line_no) {}
  int line;
};

struct EmptyRecordingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Recording load_recording(const std::filesystem::path& path, DatasetFormat format);

/// Uniform-dt snapshots via per-agent linear interpolation between annotated
/// frames. An agent is present only between its first and last annotation.
/// Velocities are left zero; see extract_augmented_states.
std::vector<WorldSnapshot> resample(const Recording& recording, double dt);

/// Finite-difference velocities between two snapshots. Agents present only in
/// curr get zero speed and heading 0.
std::vector<AugmentedAgentState> extract_augmented_states(const WorldSnapshot& prev,
                                                          const WorldSnapshot& curr,
                                                          double dt);

/// Maps atan2 output onto [0, 2pi).
double wrap_heading(double angle);

/// Circular distance between two headings, in [0, pi].
double heading_distance(double a, double b);

}  // namespace gmpc
