#include "gmpc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gmpc {

namespace {

double orient(const Vec2& o, const Vec2& a, const Vec2& b) {
  return cross2(a - o, b - o);
}

}  // namespace

Polygon convex_hull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec2& a, const Vec2& b) { return a == b; }),
               points.end());
  const std::size_t n = points.size();
  if (n < 3) return points;

  Polygon hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && orient(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross2(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * twice;
}

Vec2 polygon_centroid(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n == 0) return Vec2::Zero();
  const double area = polygon_area(poly);
  if (n < 3 || std::abs(area) < 1e-12) {
    Vec2 mean = Vec2::Zero();
    for (const Vec2& v : poly) mean += v;
    return mean / static_cast<double>(n);
  }
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    c += (a + b) * cross2(a, b);
  }
  return c / (6.0 * area);
}

bool point_in_convex(const Vec2& p, const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (cross2(b - a, p - a) < 0.0) return false;
  }
  return true;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double boundary_distance(const Vec2& p, const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (n == 1) return (p - poly[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  }
  return best;
}

double signed_distance(const Vec2& p, const Polygon& poly) {
  const double d = boundary_distance(p, poly);
  return point_in_convex(p, poly) ? -d : d;
}

Polygon translated(const Polygon& poly, const Vec2& offset) {
  Polygon out = poly;
  for (Vec2& v : out) v += offset;
  return out;
}

Box2 bounding_box(const Polygon& poly) {
  Box2 box;
  for (const Vec2& v : poly) box.extend(v);
  return box;
}

Polygon inflate_degenerate(Polygon poly, double circumradius) {
  if (poly.size() >= 3 && polygon_area(poly) > 0.0) return poly;
  Vec2 center = Vec2::Zero();
  if (!poly.empty()) {
    for (const Vec2& v : poly) center += v;
    center /= static_cast<double>(poly.size());
  }
  Polygon tri(3);
  for (int i = 0; i < 3; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / 3.0;
    tri[i] = center + circumradius * Vec2(std::cos(ang), std::sin(ang));
  }
  return tri;
}

}  // namespace gmpc
