#include "gmpc/orca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmpc {

namespace {

constexpr double kEpsilon = 1e-10;

struct HalfPlane {
  Vec2 point;
  Vec2 direction;  // feasible side is to the left
};

/// 1-D program along constraint `index`, clipped by the speed circle and the
/// previous constraints. Returns false when the segment is empty.
bool linear_program_1(const std::vector<HalfPlane>& lines, std::size_t index,
                      double radius, const Vec2& opt, bool direction_opt, Vec2& result) {
  const double dot = lines[index].point.dot(lines[index].direction);
  const double discriminant =
      dot * dot + radius * radius - lines[index].point.squaredNorm();
  if (discriminant < 0.0) return false;

  const double sqrt_disc = std::sqrt(discriminant);
  double t_left = -dot - sqrt_disc;
  double t_right = -dot + sqrt_disc;

  for (std::size_t i = 0; i < index; ++i) {
    const double denom = cross2(lines[index].direction, lines[i].direction);
    const double numer =
        cross2(lines[i].direction, lines[index].point - lines[i].point);
    if (std::fabs(denom) <= kEpsilon) {
      if (numer < 0.0) return false;  // parallel and infeasible
      continue;
    }
    const double t = numer / denom;
    if (denom >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  if (direction_opt) {
    const double extreme =
        opt.dot(lines[index].direction) > 0.0 ? t_right : t_left;
    result = lines[index].point + extreme * lines[index].direction;
  } else {
    const double t =
        std::clamp(lines[index].direction.dot(opt - lines[index].point), t_left, t_right);
    result = lines[index].point + t * lines[index].direction;
  }
  return true;
}

/// 2-D program over all constraints; returns the index of the first failing
/// constraint, or lines.size() on success.
std::size_t linear_program_2(const std::vector<HalfPlane>& lines, double radius,
                             const Vec2& opt, bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = opt * radius;
  } else if (opt.squaredNorm() > radius * radius) {
    result = opt.normalized() * radius;
  } else {
    result = opt;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (cross2(lines[i].direction, lines[i].point - result) > 0.0) {
      const Vec2 saved = result;
      if (!linear_program_1(lines, i, radius, opt, direction_opt, result)) {
        result = saved;
        return i;
      }
    }
  }
  return lines.size();
}

/// Infeasible fallback: minimize the largest constraint violation by
/// projecting onto successive constraint intersections.
void linear_program_3(const std::vector<HalfPlane>& lines, std::size_t begin,
                      double radius, Vec2& result) {
  double distance = 0.0;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (cross2(lines[i].direction, lines[i].point - result) <= distance) continue;

    std::vector<HalfPlane> projected;
    projected.reserve(i);
    for (std::size_t j = 0; j < i; ++j) {
      HalfPlane line;
      const double determinant = cross2(lines[i].direction, lines[j].direction);
      if (std::fabs(determinant) <= kEpsilon) {
        if (lines[i].direction.dot(lines[j].direction) > 0.0) continue;
        line.point = 0.5 * (lines[i].point + lines[j].point);
      } else {
        line.point =
            lines[i].point +
            (cross2(lines[j].direction, lines[i].point - lines[j].point) / determinant) *
                lines[i].direction;
      }
      line.direction = (lines[j].direction - lines[i].direction).normalized();
      projected.push_back(line);
    }

    const Vec2 saved = result;
    const Vec2 perpendicular(-lines[i].direction.y(), lines[i].direction.x());
    if (linear_program_2(projected, radius, perpendicular, true, result) <
        projected.size()) {
      result = saved;  // numerical fallback, result already feasible enough
    }
    distance = cross2(lines[i].direction, lines[i].point - result);
  }
}

HalfPlane orca_constraint(const OrcaAgent& agent, const OrcaAgent& other,
                          double responsibility, double inv_time_horizon, double dt) {
  const Vec2 relative_position = other.position - agent.position;
  const Vec2 relative_velocity = agent.velocity - other.velocity;
  const double dist_sq = relative_position.squaredNorm();
  const double combined_radius = agent.radius + other.radius;
  const double combined_radius_sq = combined_radius * combined_radius;

  HalfPlane line;
  Vec2 u;
  if (dist_sq > combined_radius_sq) {
    const Vec2 w = relative_velocity - inv_time_horizon * relative_position;
    const double w_length_sq = w.squaredNorm();
    const double dot = w.dot(relative_position);
    if (dot < 0.0 && dot * dot > combined_radius_sq * w_length_sq) {
      // Project on the cut-off circle.
      const double w_length = std::sqrt(w_length_sq);
      const Vec2 unit_w = w / w_length;
      line.direction = Vec2(unit_w.y(), -unit_w.x());
      u = (combined_radius * inv_time_horizon - w_length) * unit_w;
    } else {
      // Project on the nearer leg of the velocity-obstacle cone.
      const double leg = std::sqrt(dist_sq - combined_radius_sq);
      if (cross2(relative_position, w) > 0.0) {
        line.direction = Vec2(relative_position.x() * leg -
                                  relative_position.y() * combined_radius,
                              relative_position.x() * combined_radius +
                                  relative_position.y() * leg) /
                         dist_sq;
      } else {
        line.direction = -Vec2(relative_position.x() * leg +
                                   relative_position.y() * combined_radius,
                               -relative_position.x() * combined_radius +
                                   relative_position.y() * leg) /
                         dist_sq;
      }
      u = relative_velocity.dot(line.direction) * line.direction - relative_velocity;
    }
  } else {
    // Already overlapping: resolve within one timestep.
    const double inv_dt = 1.0 / dt;
    const Vec2 w = relative_velocity - inv_dt * relative_position;
    const double w_length = w.norm();
    const Vec2 unit_w = w_length > kEpsilon ? Vec2(w / w_length) : Vec2(1.0, 0.0);
    line.direction = Vec2(unit_w.y(), -unit_w.x());
    u = (combined_radius * inv_dt - w_length) * unit_w;
  }
  line.point = agent.velocity + responsibility * u;
  return line;
}

}  // namespace

Vec2 orca_velocity(const OrcaAgent& agent, const Vec2& preferred,
                   const std::vector<const OrcaAgent*>& neighbors,
                   const std::vector<bool>& reciprocal, double dt,
                   const OrcaConfig& cfg) {
  const double inv_time_horizon = 1.0 / cfg.time_horizon;
  std::vector<HalfPlane> lines;
  lines.reserve(neighbors.size());
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    const double responsibility = reciprocal[i] ? 0.5 : 1.0;
    lines.push_back(
        orca_constraint(agent, *neighbors[i], responsibility, inv_time_horizon, dt));
  }

  Vec2 new_velocity;
  const std::size_t fail =
      linear_program_2(lines, agent.max_speed, preferred, false, new_velocity);
  if (fail < lines.size()) {
    linear_program_3(lines, fail, agent.max_speed, new_velocity);
  }
  return new_velocity;
}

std::vector<OrcaAgent> step_orca_agents(const std::vector<OrcaAgent>& agents,
                                        const std::optional<OrcaAgent>& robot, double dt,
                                        const OrcaConfig& cfg) {
  if (dt <= 0.0) throw std::invalid_argument("step_orca_agents: dt must be positive");

  const double neighbor_dist_sq = cfg.neighbor_dist * cfg.neighbor_dist;
  std::vector<OrcaAgent> next;
  next.reserve(agents.size());

  for (const OrcaAgent& agent : agents) {
    std::vector<const OrcaAgent*> neighbors;
    std::vector<bool> reciprocal;
    for (const OrcaAgent& other : agents) {
      if (other.id == agent.id) continue;
      if ((other.position - agent.position).squaredNorm() > neighbor_dist_sq) continue;
      neighbors.push_back(&other);
      reciprocal.push_back(true);
    }
    if (robot.has_value() &&
        (robot->position - agent.position).squaredNorm() <= neighbor_dist_sq) {
      neighbors.push_back(&*robot);
      reciprocal.push_back(false);
    }

    const Vec2 to_goal = agent.goal - agent.position;
    const double dist = to_goal.norm();
    Vec2 preferred = Vec2::Zero();
    if (dist > kEpsilon) {
      // Do not overshoot the goal within one step.
      const double speed = std::min(agent.pref_speed, dist / dt);
      preferred = to_goal / dist * speed;
    }

    OrcaAgent stepped = agent;
    stepped.velocity = orca_velocity(agent, preferred, neighbors, reciprocal, dt, cfg);
    stepped.position = agent.position + stepped.velocity * dt;
    if ((stepped.position - stepped.goal).norm() > cfg.exit_radius) {
      next.push_back(stepped);
    }
  }
  return next;
}

}  // namespace gmpc
