// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace skyground::geometry {

using Point2 = Eigen::Vector2d;
using Polygon = std::vector<Point2>;

// Shoelace area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Point2> poly) noexcept;
double area(std::span<const Point2> poly) noexcept;

// Reverses clockwise polygons in place.
void make_ccw(Polygon& poly);

/// Sutherland-Hodgman clip of `subject` against the convex polygon `clip`.
/// Both inputs must be convex and counter-clockwise. Vertices lying exactly
/// on a clip edge are kept, so clipping a polygon against itself returns it
/// unchanged.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
Polygon convex_hull(std::vector<Point2> points);

struct RotatedRect {
    Point2 center;
    double width = 0.0;   // extent along `angle`
    double height = 0.0;  // extent perpendicular to `angle`
    double angle = 0.0;   // rad, direction of the width axis
};

// Minimum-area enclosing rectangle via rotating calipers over the hull.
RotatedRect min_area_rect(std::span<const Point2> points);

}  // namespace skyground::geometry
