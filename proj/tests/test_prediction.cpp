#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gmpc/prediction.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace gmpc;

namespace {

GroupSpace make_space(int label, const Polygon& poly) {
  GroupSpace gs;
  gs.label = label;
  gs.polygon = poly;
  return gs;
}

Polygon unit_square(const Vec2& lower_left = Vec2::Zero()) {
  return translated({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, lower_left);
}

GroupSpaceSequence translating_history(const Vec2& step, int frames) {
  GroupSpaceSequence seq;
  seq.label = 0;
  for (int k = 0; k < frames; ++k) {
    seq.spaces.push_back(make_space(0, unit_square(k * step)));
  }
  return seq;
}

}  // namespace

TEST_CASE("hold oracle repeats the last polygon") {
  const auto history = translating_history(Vec2(0.1, 0), 8);
  const auto forecast = predict_hold(history, 8);
  REQUIRE(forecast.spaces.size() == 8);
  for (const GroupSpace& gs : forecast.spaces) {
    REQUIRE(gs.polygon.size() == history.spaces.back().polygon.size());
    for (std::size_t i = 0; i < gs.polygon.size(); ++i) {
      CHECK((gs.polygon[i] - history.spaces.back().polygon[i]).norm() == 0.0);
    }
  }
}

TEST_CASE("linear oracle holds still for a stationary group") {
  const auto history = translating_history(Vec2::Zero(), 8);
  const auto forecast = predict_linear(history, 8);
  for (const GroupSpace& gs : forecast.spaces) {
    for (std::size_t i = 0; i < gs.polygon.size(); ++i) {
      CHECK((gs.polygon[i] - history.spaces.back().polygon[i]).norm() < 1e-12);
    }
  }
}

TEST_CASE("linear oracle translates rigidly by the centroid step") {
  const Vec2 step(0.1, 0.0);
  const auto history = translating_history(step, 8);
  const auto forecast = predict_linear(history, 8);
  const Polygon& last = history.spaces.back().polygon;
  for (int k = 1; k <= 8; ++k) {
    const Polygon& pred = forecast.spaces[k - 1].polygon;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      CHECK((pred[i] - (last[i] + k * step)).norm() < 1e-12);
    }
  }
  // square centroid after 4 predicted frames: 0.5 + 0.7 history + 0.4 forecast
  const Vec2 c = polygon_centroid(forecast.spaces[3].polygon);
  CHECK(c.x() == doctest::Approx(0.5 + 0.7 + 0.4));
}

TEST_CASE("linear oracle requires two frames") {
  GroupSpaceSequence one;
  one.spaces.push_back(make_space(0, unit_square()));
  CHECK_THROWS_AS(predict_linear(one, 4), InsufficientHistoryError);
  OracleConfig cfg;
  cfg.kind = OracleKind::Linear;
  CHECK_THROWS_AS(predict(one, cfg), InsufficientHistoryError);
}

TEST_CASE("prediction is congruent to the last observed polygon") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  GroupSpaceSequence history;
  history.spaces.push_back(make_space(0, convex_hull({{0, 0}, {2, 0}, {1.5, 1}, {0.3, 1.2}})));
  history.spaces.push_back(
      make_space(0, translated(history.spaces[0].polygon, Vec2(d(rng), d(rng)))));
  const auto forecast = predict_linear(history, 5);
  const Polygon& last = history.spaces.back().polygon;
  for (const GroupSpace& gs : forecast.spaces) {
    REQUIRE(gs.polygon.size() == last.size());
    for (std::size_t i = 0; i < last.size(); ++i) {
      for (std::size_t j = i + 1; j < last.size(); ++j) {
        const double before = (last[i] - last[j]).norm();
        const double after = (gs.polygon[i] - gs.polygon[j]).norm();
        CHECK(std::fabs(before - after) < 1e-12);
      }
    }
  }
}

TEST_CASE("linear oracle is equivariant under rigid translation of the history") {
  const auto history = translating_history(Vec2(0.07, -0.03), 8);
  GroupSpaceSequence shifted = history;
  const Vec2 offset(3.0, -2.0);
  for (GroupSpace& gs : shifted.spaces) gs.polygon = translated(gs.polygon, offset);
  const auto f0 = predict_linear(history, 6);
  const auto f1 = predict_linear(shifted, 6);
  for (int k = 0; k < 6; ++k) {
    for (std::size_t i = 0; i < f0.spaces[k].polygon.size(); ++i) {
      CHECK((f1.spaces[k].polygon[i] - (f0.spaces[k].polygon[i] + offset)).norm() < 1e-9);
    }
  }
}

TEST_CASE("external oracle reads records and falls back to hold") {
  ExternalForecastStore store;
  store.insert("trial_a", 5, 0, unit_square(Vec2(9, 9)));
  OracleConfig cfg;
  cfg.kind = OracleKind::External;
  cfg.horizon = 2;
  OracleContext ctx;
  ctx.trial_id = "trial_a";
  ctx.step = 4;
  ctx.external = &store;

  const auto history = translating_history(Vec2(0.1, 0), 3);
  const auto forecast = predict(history, cfg, &ctx);
  REQUIRE(forecast.spaces.size() == 2);
  // step 5 comes from the store
  CHECK(polygon_centroid(forecast.spaces[0].polygon).x() == doctest::Approx(9.5));
  // step 6 missing: hold of the last observed polygon
  CHECK(polygon_centroid(forecast.spaces[1].polygon).x() ==
        doctest::Approx(polygon_centroid(history.spaces.back().polygon).x()));
}

TEST_CASE("external store round-trips through its file format") {
  ExternalForecastStore store;
  store.insert("t0", 1, 2, unit_square(Vec2(1, 1)));
  store.insert("t0", 2, 2, unit_square(Vec2(2, 1)));
  const auto path = std::filesystem::temp_directory_path() / "forecasts.txt";
  store.save(path);
  const auto loaded = ExternalForecastStore::load(path);
  CHECK(loaded.size() == 2);
  const auto poly = loaded.lookup("t0", 2, 2);
  REQUIRE(poly.has_value());
  CHECK(polygon_centroid(*poly).x() == doctest::Approx(2.5));
  CHECK_FALSE(loaded.lookup("t0", 3, 2).has_value());
}

TEST_CASE("IoU of identical polygons is 1") {
  const Polygon a = unit_square();
  const RasterGrid grid = make_grid_covering({&a}, 0.05);
  CHECK(iou(a, a, grid) == doctest::Approx(1.0));
}

TEST_CASE("IoU of disjoint polygons is 0") {
  const Polygon a = unit_square();
  const Polygon b = unit_square(Vec2(5, 5));
  const RasterGrid grid = make_grid_covering({&a, &b}, 0.05);
  CHECK(iou(a, b, grid) == doctest::Approx(0.0));
}

TEST_CASE("IoU of a half-overlapped unit square is 1/3") {
  const Polygon a = unit_square();
  const Polygon b = unit_square(Vec2(0.5, 0.0));
  const RasterGrid grid = make_grid_covering({&a, &b}, 0.05);
  CHECK(std::fabs(iou(a, b, grid) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("IoU is symmetric, bounded, and translation-invariant") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Polygon a = unit_square(Vec2(d(rng), d(rng)));
    const Polygon b = unit_square(Vec2(d(rng), d(rng)));
    const RasterGrid grid = make_grid_covering({&a, &b}, 0.05);
    const double ab = iou(a, b, grid);
    CHECK(ab == iou(b, a, grid));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);

    const Vec2 offset(d(rng) * 10, d(rng) * 10);
    const Polygon at = translated(a, offset);
    const Polygon bt = translated(b, offset);
    RasterGrid moved = grid;
    moved.bounds = Box2(grid.bounds.min() + offset, grid.bounds.max() + offset);
    CHECK(iou(at, bt, moved) == doctest::Approx(ab));
  }
}

TEST_CASE("perfect prediction scores (1, 1)") {
  const auto seq = translating_history(Vec2(0.1, 0), 8);
  const auto [miou, fiou] = evaluate_sequence(seq, seq, 0.05);
  CHECK(miou == doctest::Approx(1.0));
  CHECK(fiou == doctest::Approx(1.0));
}

TEST_CASE("linear oracle on a constant-velocity group scores above 0.98") {
  const Vec2 step(0.13, 0.05);
  const auto all = translating_history(step, 16);
  GroupSpaceSequence history, actual;
  history.spaces.assign(all.spaces.begin(), all.spaces.begin() + 8);
  actual.spaces.assign(all.spaces.begin() + 8, all.spaces.end());
  const auto forecast = predict_linear(history, 8);
  const auto [miou, fiou] = evaluate_sequence(forecast, actual, 0.05);
  CHECK(miou >= 0.98);
  CHECK(fiou >= 0.98);
  CHECK(miou >= fiou - 1e-9);
}

TEST_CASE("hold oracle degrades with horizon on a translating group") {
  const Vec2 step(0.1, 0.0);
  const auto all = translating_history(step, 16);
  GroupSpaceSequence history, actual;
  history.spaces.assign(all.spaces.begin(), all.spaces.begin() + 8);
  actual.spaces.assign(all.spaces.begin() + 8, all.spaces.end());
  const auto forecast = predict_hold(history, 8);
  const auto [miou, fiou] = evaluate_sequence(forecast, actual, 0.05);
  CHECK(fiou < miou);
  // final frame: unit squares offset by 0.8 overlap analytically at 0.2/1.8
  CHECK(std::fabs(fiou - 0.2 / 1.8) < 0.02);
}

TEST_CASE("rotating group scores below 1 and decays with horizon") {
  auto rotated_slab = [](double angle) {
    Polygon p;
    for (const Vec2& v : {Vec2(-1, -0.25), Vec2(1, -0.25), Vec2(1, 0.25), Vec2(-1, 0.25)}) {
      p.push_back(Eigen::Rotation2Dd(angle) * v);
    }
    return p;
  };
  GroupSpaceSequence history, actual;
  for (int k = 0; k < 8; ++k) history.spaces.push_back(make_space(0, rotated_slab(0.0)));
  for (int k = 1; k <= 8; ++k) {
    actual.spaces.push_back(make_space(0, rotated_slab(0.15 * k)));
  }
  const auto forecast = predict_linear(history, 8);
  std::vector<double> per_frame;
  for (int k = 0; k < 8; ++k) {
    const RasterGrid grid = make_grid_covering(
        {&forecast.spaces[k].polygon, &actual.spaces[k].polygon}, 0.05);
    per_frame.push_back(iou(forecast.spaces[k].polygon, actual.spaces[k].polygon, grid));
  }
  CHECK(per_frame.front() < 1.0);
  CHECK(per_frame.back() < per_frame.front());
}

TEST_CASE("evaluate_sequence rejects mismatched lengths") {
  const auto a = translating_history(Vec2(0.1, 0), 4);
  const auto b = translating_history(Vec2(0.1, 0), 5);
  CHECK_THROWS_AS(evaluate_sequence(a, b, 0.05), std::invalid_argument);
}

TEST_CASE("mean IoU lies between the per-frame extremes") {
  const Vec2 step(0.1, 0.0);
  const auto all = translating_history(step, 12);
  GroupSpaceSequence history, actual;
  history.spaces.assign(all.spaces.begin(), all.spaces.begin() + 4);
  actual.spaces.assign(all.spaces.begin() + 4, all.spaces.begin() + 12);
  const auto forecast = predict_hold(history, 8);
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < 8; ++k) {
    const RasterGrid grid = make_grid_covering(
        {&forecast.spaces[k].polygon, &actual.spaces[k].polygon}, 0.05);
    const double v = iou(forecast.spaces[k].polygon, actual.spaces[k].polygon, grid);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const auto [miou, fiou] = evaluate_sequence(forecast, actual, 0.05);
  CHECK(miou >= lo - 1e-12);
  CHECK(miou <= hi + 1e-12);
}
