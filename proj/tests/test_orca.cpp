#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmpc/orca.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace gmpc;

namespace {

OrcaAgent make_agent(int id, const Vec2& pos, const Vec2& goal, double pref = 1.2) {
  OrcaAgent a;
  a.id = id;
  a.position = pos;
  a.goal = goal;
  a.pref_speed = pref;
  a.radius = 0.3;
  a.max_speed = 1.8;
  return a;
}

double min_pairwise_distance(const std::vector<OrcaAgent>& agents) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      best = std::min(best, (agents[i].position - agents[j].position).norm());
    }
  }
  return best;
}

}  // namespace

TEST_CASE("a lone agent walks straight to its goal at preferred speed") {
  OrcaConfig cfg;
  std::vector<OrcaAgent> agents = {make_agent(1, Vec2(0, 0), Vec2(10, 0))};
  for (int step = 0; step < 10; ++step) {
    agents = step_orca_agents(agents, std::nullopt, 0.1, cfg);
    REQUIRE(agents.size() == 1);
    CHECK(agents[0].velocity.x() == doctest::Approx(1.2));
    CHECK(agents[0].velocity.y() == doctest::Approx(0.0));
  }
  CHECK(agents[0].position.x() == doctest::Approx(1.2));
}

TEST_CASE("an agent at its goal is removed") {
  OrcaConfig cfg;
  std::vector<OrcaAgent> agents = {make_agent(1, Vec2(9.99, 0), Vec2(10, 0))};
  agents = step_orca_agents(agents, std::nullopt, 0.1, cfg);
  CHECK(agents.empty());
}

TEST_CASE("head-on swap: both deviate and keep separation above the radii sum") {
  OrcaConfig cfg;
  std::vector<OrcaAgent> agents = {make_agent(1, Vec2(-4, 0), Vec2(4, 0)),
                                   make_agent(2, Vec2(4, 0.01), Vec2(-4, 0.01))};
  double min_sep = std::numeric_limits<double>::infinity();
  double max_lateral = 0.0;
  for (int step = 0; step < 120; ++step) {
    agents = step_orca_agents(agents, std::nullopt, 0.1, cfg);
    if (agents.size() < 2) break;
    min_sep = std::min(min_sep, min_pairwise_distance(agents));
    for (const OrcaAgent& a : agents) {
      max_lateral = std::max(max_lateral, std::fabs(a.position.y()));
    }
  }
  CHECK(min_sep >= 0.6 - 1e-6);  // sum of radii
  CHECK(max_lateral > 0.05);     // both swerved rather than stopping dead
}

TEST_CASE("agents never overlap in an uncongested crossing") {
  OrcaConfig cfg;
  std::vector<OrcaAgent> agents;
  // six agents converging on the origin from a circle
  for (int i = 0; i < 6; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / 6.0;
    const Vec2 start(5.0 * std::cos(ang), 5.0 * std::sin(ang));
    agents.push_back(make_agent(i + 1, start, -start));
  }
  double min_sep = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 200 && agents.size() > 1; ++step) {
    agents = step_orca_agents(agents, std::nullopt, 0.1, cfg);
    if (agents.size() > 1) min_sep = std::min(min_sep, min_pairwise_distance(agents));
  }
  CHECK(min_sep >= 0.6 - 1e-6);
}

TEST_CASE("an agent bends around a stationary robot in its path") {
  OrcaConfig cfg;
  std::vector<OrcaAgent> agents = {make_agent(1, Vec2(-5, 0), Vec2(5, 0))};
  // a hair off the exact line; perfect symmetry admits a pure-slowdown answer
  OrcaAgent robot = make_agent(-1, Vec2(0, 0.01), Vec2(0, 0.01), 0.0);
  robot.velocity = Vec2::Zero();

  double min_dist = std::numeric_limits<double>::infinity();
  bool reached = false;
  for (int step = 0; step < 300; ++step) {
    agents = step_orca_agents(agents, robot, 0.1, cfg);
    if (agents.empty()) {
      reached = true;
      break;
    }
    min_dist = std::min(min_dist, (agents[0].position - robot.position).norm());
  }
  CHECK(reached);
  CHECK(min_dist >= 0.6 - 1e-6);
}

TEST_CASE("stepping is deterministic") {
  OrcaConfig cfg;
  auto scene = [&] {
    std::vector<OrcaAgent> agents = {make_agent(1, Vec2(-3, 0.2), Vec2(3, 0)),
                                     make_agent(2, Vec2(3, -0.2), Vec2(-3, 0)),
                                     make_agent(3, Vec2(0, 3), Vec2(0, -3))};
    for (int step = 0; step < 50 && !agents.empty(); ++step) {
      agents = step_orca_agents(agents, std::nullopt, 0.1, cfg);
    }
    return agents;
  };
  const auto a = scene();
  const auto b = scene();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i].position - b[i].position).norm() == 0.0);
    CHECK((a[i].velocity - b[i].velocity).norm() == 0.0);
  }
}

TEST_CASE("preferred velocity caps at the remaining goal distance") {
  OrcaConfig cfg;
  cfg.exit_radius = 0.01;
  std::vector<OrcaAgent> agents = {make_agent(1, Vec2(0, 0), Vec2(0.15, 0))};
  agents = step_orca_agents(agents, std::nullopt, 0.1, cfg);
  REQUIRE(agents.size() == 1);
  CHECK(agents[0].position.x() == doctest::Approx(0.12));
  // second step covers exactly the remaining 0.03 m; an uncapped step would
  // overshoot to 0.24 and miss the exit radius
  agents = step_orca_agents(agents, std::nullopt, 0.1, cfg);
  CHECK(agents.empty());
}
