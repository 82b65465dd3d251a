// SPDX-License-Identifier: Apache-2.0
#include "skyground/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skyground/error.hpp"

namespace skyground::geometry {
namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Intersection of segment p->q with the infinite line through a->b.
Point2 intersect(const Point2& p, const Point2& q, const Point2& a, const Point2& b) {
    const double cp = cross(a, b, p);
    const double cq = cross(a, b, q);
    const double t = cp / (cp - cq);
    return p + t * (q - p);
}

}  // namespace

double signed_area(std::span<const Point2> poly) noexcept {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        acc += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * acc;
}

double area(std::span<const Point2> poly) noexcept { return std::abs(signed_area(poly)); }

void make_ccw(Polygon& poly) {
    if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
    Polygon out = subject;
    const std::size_t m = clip.size();
    for (std::size_t e = 0; e < m && !out.empty(); ++e) {
        const Point2& a = clip[e];
        const Point2& b = clip[(e + 1) % m];
        Polygon in;
        in.swap(out);
        out.reserve(in.size() + 2);
        const std::size_t n = in.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& cur = in[i];
            const Point2& prev = in[(i + n - 1) % n];
            const bool cur_in = cross(a, b, cur) >= 0.0;
            const bool prev_in = cross(a, b, prev) >= 0.0;
            if (cur_in) {
                if (!prev_in) out.push_back(intersect(prev, cur, a, b));
                out.push_back(cur);
            } else if (prev_in) {
                out.push_back(intersect(prev, cur, a, b));
            }
        }
    }
    return out;
}

Polygon convex_hull(std::vector<Point2> points) {
    std::sort(points.begin(), points.end(), [](const Point2& l, const Point2& r) {
        return l.x() < r.x() || (l.x() == r.x() && l.y() < r.y());
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3) return points;

    Polygon hull(2 * points.size());
    std::size_t k = 0;
    for (const auto& p : points) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
        const auto& p = points[i];
        while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

RotatedRect min_area_rect(std::span<const Point2> points) {
    const Polygon hull = convex_hull({points.begin(), points.end()});
    if (hull.size() < 3) throw Error(Errc::InvalidArgument, "min_area_rect needs a non-degenerate point set");

    RotatedRect best;
    double best_area = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2 edge = hull[(i + 1) % hull.size()] - hull[i];
        const Point2 u = edge.normalized();
        const Point2 v(-u.y(), u.x());
        double umin = std::numeric_limits<double>::infinity(), umax = -umin;
        double vmin = umin, vmax = -umin;
        for (const auto& p : hull) {
            const double pu = p.dot(u), pv = p.dot(v);
            umin = std::min(umin, pu);
            umax = std::max(umax, pu);
            vmin = std::min(vmin, pv);
            vmax = std::max(vmax, pv);
        }
        const double a = (umax - umin) * (vmax - vmin);
        if (a < best_area) {
            best_area = a;
            best.center = 0.5 * (umin + umax) * u + 0.5 * (vmin + vmax) * v;
            best.width = umax - umin;
            best.height = vmax - vmin;
            best.angle = std::atan2(u.y(), u.x());
        }
    }
    return best;
}

}  // namespace skyground::geometry
