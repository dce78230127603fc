#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace gmpc {

using Vec2 = Eigen::Vector2d;
using Box2 = Eigen::AlignedBox2d;

/// Convex polygon as a counterclockwise vertex list (no repeated endpoint).
using Polygon = std::vector<Vec2>;

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Monotone-chain convex hull, counterclockwise, collinear points dropped.
Polygon convex_hull(std::vector<Vec2> points);

/// Shoelace area; positive for counterclockwise vertex order.
double polygon_area(const Polygon& poly);

/// Area centroid. Falls back to the vertex mean for near-zero-area polygons.
Vec2 polygon_centroid(const Polygon& poly);

/// True if the point is inside or on the boundary of a convex CCW polygon.
bool point_in_convex(const Vec2& p, const Polygon& poly);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Distance from a point to the polygon boundary (always >= 0).
double boundary_distance(const Vec2& p, const Polygon& poly);

/// Negative inside the polygon, positive outside, zero on the boundary.
/// Magnitude is the distance to the boundary in both cases.
double signed_distance(const Vec2& p, const Polygon& poly);

Polygon translated(const Polygon& poly, const Vec2& offset);

Box2 bounding_box(const Polygon& poly);

/// Replaces a degenerate hull (point or collinear segment) with a small
/// triangle of the given circumradius so downstream code can assume positive
/// area. Non-degenerate polygons pass through unchanged.
Polygon inflate_degenerate(Polygon poly, double circumradius = 1e-3);

}  // namespace gmpc
