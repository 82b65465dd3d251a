// SPDX-License-Identifier: Apache-2.0
#include "skyground/bbox3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "skyground/error.hpp"

namespace skyground::geometry {

bool OrientedBox2D::valid() const noexcept {
    return std::isfinite(cx) && std::isfinite(cy) && width > 0.0 && height > 0.0 &&
           angle >= -std::numbers::pi / 2 && angle < std::numbers::pi / 2;
}

std::array<PixelPoint, 4> OrientedBox2D::corners() const noexcept {
    const double c = std::cos(angle), s = std::sin(angle);
    const double hw = width / 2.0, hh = height / 2.0;
    // long axis (c, s), short axis (-s, c)
    return {{{cx + hw * c - hh * s, cy + hw * s + hh * c},
             {cx - hw * c - hh * s, cy - hw * s + hh * c},
             {cx - hw * c + hh * s, cy - hw * s - hh * c},
             {cx + hw * c + hh * s, cy + hw * s - hh * c}}};
}

CameraPoint Box3D::ground_center(const CameraModel& cam) const noexcept {
    return CameraPoint::from(center.vec() - 0.5 * height * ground_normal(cam));
}

GroundBasis ground_basis(const CameraModel& cam) noexcept {
    GroundBasis basis;
    basis.lateral = Eigen::Vector3d::UnitX();
    basis.normal = ground_normal(cam);
    basis.longitudinal = basis.normal.cross(basis.lateral).normalized();
    return basis;
}

double wrap_half_turn(double angle) noexcept {
    constexpr double pi = std::numbers::pi;
    double a = std::fmod(angle + pi / 2, pi);
    if (a < 0.0) a += pi;
    // fmod can land exactly on pi after the shift for tiny negative inputs
    if (a >= pi) a -= pi;
    return a - pi / 2;
}

Box3D derive_box3d(const OrientedBox2D& obb, const Dimensions& dims, const CameraModel& cam,
                   double inflation) {
    if (!(dims.length > 0.0 && dims.width > 0.0 && dims.height > 0.0)) {
        throw Error(Errc::InvalidArgument, "vehicle dimensions must be positive");
    }
    if (!(inflation > 0.0)) throw Error(Errc::InvalidArgument, "inflation ratio must be positive");

    const CameraPoint ground = backproject_to_ground({obb.cx, obb.cy}, cam);

    const double delta = obb.height / 4.0;
    const double ux = std::cos(obb.angle) * delta, uy = std::sin(obb.angle) * delta;
    const Eigen::Vector3d fwd = backproject_to_ground({obb.cx + ux, obb.cy + uy}, cam).vec();
    const Eigen::Vector3d back = backproject_to_ground({obb.cx - ux, obb.cy - uy}, cam).vec();

    const GroundBasis basis = ground_basis(cam);
    const Eigen::Vector3d disp = fwd - back;
    const double along_lat = disp.dot(basis.lateral);
    const double along_lon = disp.dot(basis.longitudinal);
    if (std::hypot(along_lat, along_lon) <= 1e-12 * cam.agl) {
        throw Error(Errc::DegenerateYaw, "yaw probes back-project to coincident ground points");
    }

    Box3D box;
    box.length = dims.length * inflation;
    box.width = dims.width * inflation;
    box.height = dims.height * inflation;
    box.yaw = wrap_half_turn(std::atan2(along_lon, along_lat));
    box.center = CameraPoint::from(ground.vec() + 0.5 * box.height * basis.normal);
    return box;
}

std::array<CameraPoint, 8> box3d_corners(const Box3D& box, const CameraModel& cam) {
    const GroundBasis basis = ground_basis(cam);
    const Eigen::Vector3d along =
        std::cos(box.yaw) * basis.lateral + std::sin(box.yaw) * basis.longitudinal;
    const Eigen::Vector3d across = basis.normal.cross(along);
    const Eigen::Vector3d c = box.center.vec();
    const double hl = box.length / 2.0, hw = box.width / 2.0, hh = box.height / 2.0;

    constexpr std::array<std::array<double, 2>, 4> kFace = {{{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}};
    std::array<CameraPoint, 8> out;
    for (std::size_t i = 0; i < 4; ++i) {
        const Eigen::Vector3d offset = kFace[i][0] * hl * along + kFace[i][1] * hw * across;
        out[i] = CameraPoint::from(c + offset - hh * basis.normal);
        out[i + 4] = CameraPoint::from(c + offset + hh * basis.normal);
    }
    return out;
}

ProjectedBox project_box3d(const Box3D& box, const CameraModel& cam) {
    const auto corners = box3d_corners(box, cam);
    ProjectedBox out;
    out.hbb = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < corners.size(); ++i) {
        const PixelPoint px = project_to_pixel(corners[i], cam);
        out.corners_px[i] = px;
        out.hbb.x1 = std::min(out.hbb.x1, px.x);
        out.hbb.y1 = std::min(out.hbb.y1, px.y);
        out.hbb.x2 = std::max(out.hbb.x2, px.x);
        out.hbb.y2 = std::max(out.hbb.y2, px.y);
    }
    return out;
}

Polygon bev_footprint(const Box3D& box, const CameraModel& cam) {
    const GroundBasis basis = ground_basis(cam);
    const Eigen::Vector3d c = box.center.vec();
    const Point2 center(c.dot(basis.lateral), c.dot(basis.longitudinal));
    const Point2 along(std::cos(box.yaw), std::sin(box.yaw));
    const Point2 across(-along.y(), along.x());
    const double hl = box.length / 2.0, hw = box.width / 2.0;
    Polygon poly = {center + hl * along - hw * across, center + hl * along + hw * across,
                    center - hl * along + hw * across, center - hl * along - hw * across};
    make_ccw(poly);
    return poly;
}

double bev_iou(const Box3D& a, const Box3D& b, const CameraModel& cam) {
    const Polygon pa = bev_footprint(a, cam);
    const Polygon pb = bev_footprint(b, cam);
    const double area_a = area(pa), area_b = area(pb);
    const double inter = area(clip_convex(pa, pb));
    const double uni = area_a + area_b - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double hbb_iou(const HorizontalBox2D& a, const HorizontalBox2D& b) noexcept {
    const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

HorizontalBox2D obb_to_hbb(const OrientedBox2D& obb) noexcept {
    const auto pts = obb.corners();
    HorizontalBox2D out{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts) {
        out.x1 = std::min(out.x1, p.x);
        out.y1 = std::min(out.y1, p.y);
        out.x2 = std::max(out.x2, p.x);
        out.y2 = std::max(out.y2, p.y);
    }
    return out;
}

}  // namespace skyground::geometry
