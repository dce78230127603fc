#pragma once

#include "gmpc/geometry.hpp"
#include "gmpc/world.hpp"

#include <random>
#include <vector>

namespace gmpc {

struct LidarConfig {
  double fov = 4.71238898038469;                    // 270 degrees
  double angular_resolution = 0.008726646259971648; // 0.5 degrees
  double max_range = 40.0;                          // meters
  double range_noise_sigma = 0.03;                  // meters
  double pedestrian_radius = 0.5;                   // 1 m diameter circles
  double cluster_range_jump = 0.3;                  // meters, cluster break
  double association_radius = 0.25;                 // meters, track matching
};

/// One sweep: ranges are positive hits; rays past every circle carry +inf.
struct LidarScan {
  Vec2 origin = Vec2::Zero();
  double heading = 0.0;
  double max_range = 40.0;
  std::vector<double> angles;  // absolute bearings, one per beam
  std::vector<double> ranges;
};

inline bool has_return(const LidarScan& scan, std::size_t beam) {
  return std::isfinite(scan.ranges[beam]);
}

/// Casts one beam fan from the robot pose against pedestrian circles: each
/// beam reports the nearest circle intersection within max_range, with
/// Gaussian range noise added to hits. Occlusion falls out of nearest-hit
/// semantics.
LidarScan simulate_lidar(const std::vector<AugmentedAgentState>& agents,
                         const Vec2& origin, double heading, const LidarConfig& cfg,
                         std::mt19937& rng);

LidarScan simulate_lidar(const std::vector<AugmentedAgentState>& agents,
                         const Vec2& origin, double heading, const LidarConfig& cfg,
                         unsigned seed);

/// Clusters contiguous returns (split on range jumps or angular gaps), pushes
/// each hit outward by the pedestrian radius to approximate the circle
/// center, and estimates velocities by nearest-neighbor association with the
/// previous detections. Detections farther than the association radius from
/// every previous track start new tracks with zero velocity.
std::vector<AugmentedAgentState> detect_pedestrians(
    const LidarScan& scan, const std::vector<AugmentedAgentState>& previous, double dt,
    int& next_track_id, const LidarConfig& cfg);

}  // namespace gmpc
