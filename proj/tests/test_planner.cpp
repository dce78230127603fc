#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmpc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace gmpc;

namespace {

constexpr double kPi = std::numbers::pi;

AugmentedAgentState agent(int id, double x, double y, double heading, double speed) {
  AugmentedAgentState a;
  a.id = id;
  a.position = Vec2(x, y);
  a.heading = heading;
  a.speed = speed;
  a.velocity = speed * Vec2(std::cos(heading), std::sin(heading));
  return a;
}

Polygon square_at(const Vec2& center, double half) {
  return {{center.x() - half, center.y() - half},
          {center.x() + half, center.y() - half},
          {center.x() + half, center.y() + half},
          {center.x() - half, center.y() + half}};
}

// Naive reference: the discounted sum written out directly from the cost
// definition, with its own inside test and its own distance routine.
double reference_cost(const std::vector<Vec2>& states, const ForecastFrames& forecast,
                      const Vec2& goal, double lambda, double gamma) {
  auto inside = [](const Vec2& p, const Polygon& poly) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % poly.size()];
      const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
      if (cross < 0.0) return false;
    }
    return true;
  };
  auto seg_dist = [](const Vec2& p, const Vec2& a, const Vec2& b) {
    const double l2 = (b - a).squaredNorm();
    const double t = l2 > 0 ? std::clamp((p - a).dot(b - a) / l2, 0.0, 1.0) : 0.0;
    return (p - (a + t * (b - a))).norm();
  };
  auto poly_dist = [&](const Vec2& p, const Polygon& poly) {
    double d = 1e18;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      d = std::min(d, seg_dist(p, poly[i], poly[(i + 1) % poly.size()]));
    }
    return d;
  };

  const std::size_t K = states.size() - 1;
  double total = 0.0;
  Vec2 last_free = states[0];
  for (std::size_t k = 1; k <= K; ++k) {
    const Vec2& wp = states[k];
    const std::vector<Polygon>& frame =
        k - 1 < forecast.size() ? forecast[k - 1] : std::vector<Polygon>{};

    bool in_any = false;
    double min_d = 1e18;
    for (const Polygon& poly : frame) {
      const bool in = inside(wp, poly);
      in_any = in_any || in;
      min_d = std::min(min_d, poly_dist(wp, poly));
    }
    if (!in_any) last_free = wp;
    const double jg = (last_free - goal).norm();
    double jd = 0.0;
    if (!frame.empty()) {
      jd = std::exp(-(in_any ? -min_d : min_d));
    }
    total += std::pow(gamma, static_cast<double>(k)) * (lambda * jg + (1.0 - lambda) * jd);
  }
  return total;
}

}  // namespace

TEST_CASE("rollout family is the full Cartesian product") {
  PlannerConfig cfg;
  const auto rollouts = generate_rollouts(cfg, 1.75, 0.1);
  CHECK(rollouts.size() == 108);  // 12 directions x 3 speeds x 3 turn rates
  // deterministic ordering: direction, then speed ascending, then omega 0,+,-
  CHECK(rollouts[0].direction == doctest::Approx(0.0));
  CHECK(rollouts[0].speed == doctest::Approx(1.75 / 3.0));
  CHECK(rollouts[0].turn_rate == doctest::Approx(0.0));
  CHECK(rollouts[1].turn_rate == doctest::Approx(kPi / 2.0));
  CHECK(rollouts[2].turn_rate == doctest::Approx(-kPi / 2.0));
  CHECK(rollouts[3].speed == doctest::Approx(2.0 * 1.75 / 3.0));
  CHECK(rollouts[9].direction == doctest::Approx(2.0 * kPi / 12.0));
}

TEST_CASE("straight rollouts cover K v dt") {
  PlannerConfig cfg;
  const auto rollouts = generate_rollouts(cfg, 1.75, 0.1);
  const ControlRollout& straight = rollouts[6];  // max speed, omega = 0
  REQUIRE(straight.turn_rate == 0.0);
  REQUIRE(straight.speed == doctest::Approx(1.75));
  const auto states = rollout_states(straight, Vec2::Zero(), 0.1);
  REQUIRE(states.size() == 9);
  CHECK(states.back().norm() == doctest::Approx(8 * 1.75 * 0.1));
  for (const Vec2& u : straight.controls) {
    CHECK(u.norm() == doctest::Approx(straight.speed));
  }
}

TEST_CASE("turning rollouts rotate the velocity from the second step") {
  PlannerConfig cfg;
  cfg.horizon = 8;
  const auto rollouts = generate_rollouts(cfg, 1.0, 0.1);
  // find psi = 0, max speed, omega = +pi/2
  const ControlRollout* r = nullptr;
  for (const auto& cand : rollouts) {
    if (cand.direction == 0.0 && cand.speed == doctest::Approx(1.0) &&
        cand.turn_rate == doctest::Approx(kPi / 2.0)) {
      r = &cand;
      break;
    }
  }
  REQUIRE(r != nullptr);
  // step k uses direction psi + omega (k-1) dt; final step rotated by 0.7 pi/2
  const Vec2& last = r->controls.back();
  const double final_dir = std::atan2(last.y(), last.x());
  CHECK(final_dir == doctest::Approx(0.7 * kPi / 2.0));
  CHECK(r->controls.front().y() == doctest::Approx(0.0));
}

TEST_CASE("goal cost freezes at the last collision-free waypoint") {
  const Vec2 goal(10, 0);
  ForecastFrames forecast(3);
  forecast[1].push_back(square_at(Vec2(2, 0), 0.6));  // second step collides

  const std::vector<Vec2> states = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  const auto jg = cost_goal(states, forecast, goal);
  REQUIRE(jg.size() == 3);
  CHECK(jg[0] == doctest::Approx(9.0));  // |s_1 - goal|, free
  CHECK(jg[1] == doctest::Approx(9.0));  // inside: frozen at s_1's distance
  CHECK(jg[2] == doctest::Approx(7.0));  // |s_3 - goal|, free again
}

TEST_CASE("penetrating an obstacle never lowers the goal cost") {
  const Vec2 goal(10, 0);
  ForecastFrames blocked(4, {square_at(Vec2(2, 0), 1.0)});
  const ForecastFrames empty(4);
  const std::vector<Vec2> states = {{0, 0}, {1, 0}, {2, 0}, {2.5, 0}, {3, 0}};
  const auto jg_blocked = cost_goal(states, blocked, goal);
  const auto jg_free = cost_goal(states, empty, goal);
  for (std::size_t k = 0; k < jg_blocked.size(); ++k) {
    CHECK(jg_blocked[k] >= jg_free[k] - 1e-12);
  }
}

TEST_CASE("rollout toward the goal beats the rollout away in empty space") {
  PlannerConfig cfg;
  cfg.lambda = 1.0;
  const Vec2 goal(10, 0);
  ControlRollout toward{0.0, 1.0, 0.0, std::vector<Vec2>(8, Vec2(1, 0))};
  ControlRollout away{kPi, 1.0, 0.0, std::vector<Vec2>(8, Vec2(-1, 0))};
  const ForecastFrames empty(8);
  const double c_toward = total_cost(rollout_states(toward, Vec2::Zero(), 0.1),
                                     empty, goal, cfg);
  const double c_away = total_cost(rollout_states(away, Vec2::Zero(), 0.1),
                                   empty, goal, cfg);
  CHECK(c_toward < c_away);
}

TEST_CASE("proximity cost at canonical distances") {
  ForecastFrames forecast(1);
  forecast[0].push_back(square_at(Vec2(0, 0), 1.0));

  // 1 m outside the nearest edge
  std::vector<Vec2> states = {{0, 0}, {2.0, 0.0}};
  auto jd = cost_proximity(states, forecast);
  CHECK(jd[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  // 0.5 m inside the boundary
  states[1] = Vec2(0.5, 0.0);
  jd = cost_proximity(states, forecast);
  CHECK(jd[0] == doctest::Approx(std::exp(0.5)).epsilon(1e-9));

  // on the boundary: both branches agree at 1
  states[1] = Vec2(1.0, 0.0);
  jd = cost_proximity(states, forecast);
  CHECK(jd[0] == doctest::Approx(1.0));

  // continuity across the boundary at 1e-6 offsets
  states[1] = Vec2(1.0 - 1e-6, 0.0);
  const double just_in = cost_proximity(states, forecast)[0];
  states[1] = Vec2(1.0 + 1e-6, 0.0);
  const double just_out = cost_proximity(states, forecast)[0];
  CHECK(std::fabs(just_in - just_out) < 1e-5);
}

TEST_CASE("lambda extremes reduce the cost to a single term") {
  ForecastFrames forecast(4);
  forecast[2].push_back(square_at(Vec2(1, 1), 0.5));
  const std::vector<Vec2> states = {{0, 0}, {0.5, 0}, {1, 0}, {1.5, 0}, {2, 0}};
  const Vec2 goal(3, 0);

  PlannerConfig cfg;
  cfg.gamma = 1.0;
  cfg.lambda = 1.0;
  const auto jg = cost_goal(states, forecast, goal);
  double expect = 0.0;
  for (double v : jg) expect += v;
  CHECK(total_cost(states, forecast, goal, cfg) == doctest::Approx(expect));

  cfg.lambda = 0.0;
  const auto jd = cost_proximity(states, forecast);
  expect = 0.0;
  for (double v : jd) expect += v;
  CHECK(total_cost(states, forecast, goal, cfg) == doctest::Approx(expect));
}

TEST_CASE("skirting a group is cheaper than cutting through it") {
  // group ahead on the straight line; lambda = 0.65, gamma = 1
  PlannerConfig cfg;
  cfg.lambda = 0.65;
  cfg.gamma = 1.0;
  const Vec2 goal(3, 0);
  ForecastFrames forecast(8, {square_at(Vec2(1.5, 0), 0.8)});

  ControlRollout through{0.0, 1.0, 0.0, std::vector<Vec2>(8, Vec2(1, 0))};
  const Vec2 lateral = Vec2(1, 1).normalized();
  ControlRollout skirt{kPi / 4.0, 1.0, 0.0, std::vector<Vec2>(8, lateral)};

  const double c_through =
      total_cost(rollout_states(through, Vec2::Zero(), 0.2), forecast, goal, cfg);
  const double c_skirt =
      total_cost(rollout_states(skirt, Vec2::Zero(), 0.2), forecast, goal, cfg);
  CHECK(c_skirt < c_through);
}

TEST_CASE("total cost matches the naive reference on random instances") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  std::uniform_real_distribution<double> gam(0.5, 1.0);
  std::uniform_int_distribution<int> n_groups(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    PlannerConfig cfg;
    cfg.lambda = lam(rng);
    cfg.gamma = gam(rng);
    const int K = 8;
    ForecastFrames forecast(K);
    for (int k = 0; k < K; ++k) {
      const int g = n_groups(rng);
      for (int i = 0; i < g; ++i) {
        forecast[k].push_back(square_at(Vec2(d(rng), d(rng)), 0.4 + 0.2 * i));
      }
    }
    std::vector<Vec2> states;
    states.emplace_back(d(rng), d(rng));
    for (int k = 0; k < K; ++k) {
      states.push_back(states.back() + Vec2(d(rng), d(rng)) * 0.1);
    }
    const Vec2 goal(d(rng), d(rng));
    const double mine = total_cost(states, forecast, goal, cfg);
    const double ref = reference_cost(states, forecast, goal, cfg.lambda, cfg.gamma);
    CHECK(std::fabs(mine - ref) < 1e-9);
  }
}

TEST_CASE("argmin is invariant to positive scaling of the costs") {
  // scale by scaling the whole scene: equivalent formulation of the property
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  PlannerConfig cfg;
  WorldConfig world;
  GroupingConfig grouping;
  OracleConfig oracle;
  PlanInput input;
  input.robot = Vec2::Zero();
  input.goal = Vec2(4, 1);
  input.history = {{agent(1, d(rng), d(rng), 0.3, 1.0), agent(2, 2, -1, 0.3, 1.0)}};
  const PlanResult base = plan(input, cfg, grouping, oracle, world);
  std::vector<double> scaled = base.per_rollout_costs;
  for (double& c : scaled) c *= 7.3;
  const std::size_t argmin_scaled =
      std::min_element(scaled.begin(), scaled.end()) - scaled.begin();
  const std::size_t argmin_base =
      std::min_element(base.per_rollout_costs.begin(), base.per_rollout_costs.end()) -
      base.per_rollout_costs.begin();
  CHECK(argmin_scaled == argmin_base);
  CHECK(base.cost == doctest::Approx(base.per_rollout_costs[argmin_base]));
}

TEST_CASE("lambda = 1 ignores the forecast when no waypoint enters a group") {
  PlannerConfig cfg;
  cfg.lambda = 1.0;
  const std::vector<Vec2> states = {{0, 0}, {0.2, 0}, {0.4, 0}};
  const Vec2 goal(5, 0);
  ForecastFrames with_group(2, {square_at(Vec2(0, 3), 0.5)});
  const ForecastFrames empty(2);
  CHECK(total_cost(states, with_group, goal, cfg) ==
        doctest::Approx(total_cost(states, empty, goal, cfg)));
}

TEST_CASE("empty scene: planner picks the straight max-speed rollout at the goal bearing") {
  PlannerConfig cfg;
  WorldConfig world;
  GroupingConfig grouping;
  OracleConfig oracle;
  PlanInput input;
  input.robot = Vec2::Zero();
  // goal along an exact rollout direction (psi = 2 pi / 12)
  const double psi = 2.0 * kPi / 12.0;
  input.goal = 10.0 * Vec2(std::cos(psi), std::sin(psi));
  const PlanResult result = plan(input, cfg, grouping, oracle, world);
  CHECK(result.best.direction == doctest::Approx(psi));
  CHECK(result.best.speed == doctest::Approx(world.v_max));
  CHECK(result.best.turn_rate == doctest::Approx(0.0));
  CHECK(result.effective_C == doctest::Approx(grouping.C));
}

TEST_CASE("plan is deterministic") {
  PlannerConfig cfg;
  WorldConfig world;
  GroupingConfig grouping;
  OracleConfig oracle;
  PlanInput input;
  input.robot = Vec2(0.3, -0.2);
  input.goal = Vec2(5, 2);
  input.history = {{agent(1, 2, 0, kPi / 2, 1.0), agent(2, 2.5, 0.4, kPi / 2, 1.1)}};
  const PlanResult a = plan(input, cfg, grouping, oracle, world);
  const PlanResult b = plan(input, cfg, grouping, oracle, world);
  CHECK(a.cost == b.cost);
  CHECK(a.best.direction == b.best.direction);
  CHECK(a.best.speed == b.best.speed);
  CHECK(a.best.turn_rate == b.best.turn_rate);
  REQUIRE(a.per_rollout_costs.size() == b.per_rollout_costs.size());
  for (std::size_t i = 0; i < a.per_rollout_costs.size(); ++i) {
    CHECK(a.per_rollout_costs[i] == b.per_rollout_costs[i]);
  }
}

TEST_CASE("goal behind a static group: first control has a lateral component") {
  PlannerConfig cfg;
  cfg.policy = PolicyKind::GroupPred;
  WorldConfig world;
  GroupingConfig grouping;
  OracleConfig oracle;
  PlanInput input;
  input.robot = Vec2(0, -2.1);
  input.goal = Vec2(0, 3.0);
  // compact stationary cluster blocking the straight line
  input.history = {{agent(1, -1.0, 0, 0, 0), agent(2, 1.0, 0, 0, 0),
                    agent(3, 0, 1.0, 0, 0), agent(4, 0, -1.0, 0, 0),
                    agent(5, -0.7, 0.7, 0, 0), agent(6, 0.7, 0.7, 0, 0)}};
  const PlanResult result = plan(input, cfg, grouping, oracle, world);
  CHECK(std::fabs(result.best_states.back().x()) > 0.05);

  // exhaustive check: the chosen rollout is the argmin over all candidates
  const auto rollouts = generate_rollouts(cfg, world.v_max, world.dt);
  double best = 1e18;
  for (const auto& r : rollouts) {
    best = std::min(best, total_cost(rollout_states(r, input.robot, world.dt),
                                     result.forecast, input.goal, cfg));
  }
  CHECK(result.cost == doctest::Approx(best));
}

TEST_CASE("robot starting inside a group plans after shrinking") {
  PlannerConfig cfg;
  cfg.policy = PolicyKind::GroupPred;
  WorldConfig world;
  GroupingConfig grouping;
  OracleConfig oracle;
  PlanInput input;
  input.robot = Vec2(0.2, 0.0);
  input.goal = Vec2(5, 0);
  input.history = {{agent(1, 0, 0, 0, 0.5)}};
  const PlanResult result = plan(input, cfg, grouping, oracle, world);
  CHECK(result.effective_C < grouping.C);
  CHECK(result.per_rollout_costs.size() == 108);
}

TEST_CASE("singleton group: ped-nopred and group-nopred obstacle sets match") {
  WorldConfig world;
  GroupingConfig grouping;
  OracleConfig oracle;
  PlanInput input;
  input.robot = Vec2(-2, 0);
  input.goal = Vec2(5, 0);
  input.history = {{agent(1, 1, 0, 0, 0)}};

  PlannerConfig ped;
  ped.policy = PolicyKind::PedNoPred;
  PlannerConfig group;
  group.policy = PolicyKind::GroupNoPred;
  const PlanResult rp = plan(input, ped, grouping, oracle, world);
  const PlanResult rg = plan(input, group, grouping, oracle, world);
  REQUIRE(rp.forecast.size() == rg.forecast.size());
  REQUIRE(rp.forecast[0].size() == 1);
  REQUIRE(rg.forecast[0].size() == 1);
  // a singleton's group space is the hull of that one personal space
  REQUIRE(rp.forecast[0][0].size() == rg.forecast[0][0].size());
  for (std::size_t i = 0; i < rp.forecast[0][0].size(); ++i) {
    CHECK((rp.forecast[0][0][i] - rg.forecast[0][0][i]).norm() < 1e-12);
  }
  CHECK(rp.cost == doctest::Approx(rg.cost));
}

TEST_CASE("ped-linear displaces each obstacle by the agent velocity per step") {
  WorldConfig world;
  GroupingConfig grouping;
  OracleConfig oracle;
  PlannerConfig cfg;
  cfg.policy = PolicyKind::PedLinear;
  PlanInput input;
  input.robot = Vec2(-3, 0);
  input.goal = Vec2(5, 0);
  input.history = {{agent(1, 0, 0, 0, 1.0)}};  // moving at (1, 0)
  const PlanResult result = plan(input, cfg, grouping, oracle, world);
  const Vec2 c0 = polygon_centroid(result.forecast[0][0]);
  for (int k = 2; k <= 8; ++k) {
    const Vec2 ck = polygon_centroid(result.forecast[k - 1][0]);
    CHECK((ck - c0 - Vec2(0.1 * (k - 1), 0)).norm() < 1e-9);
  }
}

TEST_CASE("co-moving pair: group planners close the corridor, ped planners keep it") {
  WorldConfig world;
  GroupingConfig grouping;
  OracleConfig oracle;
  PlanInput input;
  input.robot = Vec2(0, -1.2);
  input.goal = Vec2(0, 2.0);
  // two co-moving pedestrians 1.5 m apart; slow enough that their personal
  // spaces leave a corridor between them
  constexpr double kUp = kPi / 2.0;
  input.history = {{agent(1, -0.75, 0, kUp, 0.4), agent(2, 0.75, 0, kUp, 0.4)}};

  PlannerConfig ped;
  ped.policy = PolicyKind::PedNoPred;
  ped.lambda = 0.3;
  PlannerConfig group;
  group.policy = PolicyKind::GroupNoPred;
  group.lambda = 0.3;
  const PlanResult rp = plan(input, ped, grouping, oracle, world);
  const PlanResult rg = plan(input, group, grouping, oracle, world);

  // group hull covers the gap between the agents; ped polygons leave it open
  const Vec2 gap(0.0, 0.0);
  bool gap_in_group = false;
  for (const Polygon& poly : rg.forecast[0]) {
    gap_in_group = gap_in_group || point_in_convex(gap, poly);
  }
  bool gap_in_ped = false;
  for (const Polygon& poly : rp.forecast[0]) {
    gap_in_ped = gap_in_ped || point_in_convex(gap, poly);
  }
  CHECK(gap_in_group);
  CHECK_FALSE(gap_in_ped);

  // the straight rollout is scored differently by the two obstacle sets
  ControlRollout straight{kUp, world.v_max, 0.0,
                          std::vector<Vec2>(8, world.v_max * Vec2(0, 1))};
  const auto states = rollout_states(straight, input.robot, world.dt);
  const double cost_ped = total_cost(states, rp.forecast, input.goal, ped);
  const double cost_group = total_cost(states, rg.forecast, input.goal, group);
  CHECK(cost_group > cost_ped);

  // and the chosen rollouts differ on this scene
  const bool same = rp.best.direction == rg.best.direction &&
                    rp.best.speed == rg.best.speed &&
                    rp.best.turn_rate == rg.best.turn_rate;
  CHECK_FALSE(same);
}
