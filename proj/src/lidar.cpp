#include "gmpc/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmpc {

namespace {

/// Distance along the ray to the nearest intersection with a circle, or +inf.
double ray_circle(const Vec2& origin, const Vec2& dir, const Vec2& center,
                  double radius) {
  const Vec2 rel = center - origin;
  const double proj = rel.dot(dir);
  const double disc = proj * proj - rel.squaredNorm() + radius * radius;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double t = proj - std::sqrt(disc);
  return t > 0.0 ? t : std::numeric_limits<double>::infinity();
}

}  // namespace

LidarScan simulate_lidar(const std::vector<AugmentedAgentState>& agents,
                         const Vec2& origin, double heading, const LidarConfig& cfg,
                         std::mt19937& rng) {
  if (cfg.fov <= 0.0 || cfg.angular_resolution <= 0.0 || cfg.max_range <= 0.0) {
    throw std::invalid_argument("simulate_lidar: invalid config");
  }

  const int n_beams = static_cast<int>(std::lround(cfg.fov / cfg.angular_resolution)) + 1;
  LidarScan scan;
  scan.origin = origin;
  scan.heading = heading;
  scan.max_range = cfg.max_range;
  scan.angles.reserve(n_beams);
  scan.ranges.reserve(n_beams);

  std::normal_distribution<double> noise(0.0, cfg.range_noise_sigma);
  for (int i = 0; i < n_beams; ++i) {
    const double angle = heading - 0.5 * cfg.fov + i * cfg.angular_resolution;
    const Vec2 dir(std::cos(angle), std::sin(angle));
    double range = std::numeric_limits<double>::infinity();
    for (const AugmentedAgentState& a : agents) {
      range = std::min(range, ray_circle(origin, dir, a.position, cfg.pedestrian_radius));
    }
    if (range <= cfg.max_range) {
      if (cfg.range_noise_sigma > 0.0) {
        range = std::clamp(range + noise(rng), 1e-6, cfg.max_range);
      }
    } else {
      range = std::numeric_limits<double>::infinity();
    }
    scan.angles.push_back(angle);
    scan.ranges.push_back(range);
  }
  return scan;
}

LidarScan simulate_lidar(const std::vector<AugmentedAgentState>& agents,
                         const Vec2& origin, double heading, const LidarConfig& cfg,
                         unsigned seed) {
  std::mt19937 rng(seed);
  return simulate_lidar(agents, origin, heading, cfg, rng);
}

std::vector<AugmentedAgentState> detect_pedestrians(
    const LidarScan& scan, const std::vector<AugmentedAgentState>& previous, double dt,
    int& next_track_id, const LidarConfig& cfg) {
  // Contiguous-return clusters, broken on range jumps and angular gaps.
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    if (!has_return(scan, i)) continue;
    const bool continues = !clusters.empty() && i > 0 && has_return(scan, i - 1) &&
                           !clusters.back().empty() && clusters.back().back() == i - 1 &&
                           std::fabs(scan.ranges[i] - scan.ranges[i - 1]) <=
                               cfg.cluster_range_jump;
    if (continues) {
      clusters.back().push_back(i);
    } else {
      clusters.push_back({i});
    }
  }

  // Circle-center estimate per cluster: hit points pushed outward by the
  // pedestrian radius along the beam direction.
  std::vector<Vec2> centers;
  centers.reserve(clusters.size());
  for (const auto& cluster : clusters) {
    Vec2 sum = Vec2::Zero();
    for (std::size_t i : cluster) {
      const Vec2 dir(std::cos(scan.angles[i]), std::sin(scan.angles[i]));
      sum += scan.origin + (scan.ranges[i] + cfg.pedestrian_radius) * dir;
    }
    centers.push_back(sum / static_cast<double>(cluster.size()));
  }

  // Nearest-neighbor association against previous detections; matches beyond
  // the association radius start fresh tracks.
  std::vector<bool> taken(previous.size(), false);
  std::vector<AugmentedAgentState> detections;
  detections.reserve(centers.size());
  for (const Vec2& center : centers) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < previous.size(); ++j) {
      if (taken[j]) continue;
      const double d = (center - previous[j].position).norm();
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(j);
      }
    }
    AugmentedAgentState det;
    det.position = center;
    if (best >= 0 && best_dist <= cfg.association_radius) {
      taken[best] = true;
      det.id = previous[best].id;
      det.velocity = (center - previous[best].position) / dt;
      det.speed = det.velocity.norm();
      det.heading =
          det.speed > 0.0 ? wrap_heading(std::atan2(det.velocity.y(), det.velocity.x()))
                          : 0.0;
    } else {
      det.id = next_track_id++;
    }
    detections.push_back(det);
  }
  return detections;
}

}  // namespace gmpc
