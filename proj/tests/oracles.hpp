// SPDX-License-Identifier: Apache-2.0
// Independent reference computations for the tests. None of these call the
// library code they check: the ray march works in a world frame built from
// the pitch rotation, the IoU oracle counts random points against the box
// half-extents, the matcher oracle is a plain scan.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "skyground/bbox3d.hpp"
#include "skyground/camera_geometry.hpp"
#include "skyground/vehicle_table.hpp"

namespace oracle {

using skyground::geometry::CameraModel;
using skyground::geometry::CameraPoint;

// Camera axes expressed in a Z-up world frame with the camera at (0, 0, H).
inline Eigen::Matrix3d camera_to_world(double pitch) {
    Eigen::Matrix3d level;
    level.col(0) = Eigen::Vector3d(1, 0, 0);   // x right
    level.col(1) = Eigen::Vector3d(0, 0, -1);  // y down
    level.col(2) = Eigen::Vector3d(0, 1, 0);   // z forward, level
    return Eigen::AngleAxisd(-pitch, Eigen::Vector3d::UnitX()).toRotationMatrix() * level;
}

// World height above ground of a camera-frame point.
inline double world_height(const Eigen::Vector3d& p_cam, const CameraModel& cam) {
    return cam.agl + (camera_to_world(cam.pitch) * p_cam).z();
}

// Marches the pixel ray outward until it crosses the ground, then bisects.
inline std::optional<CameraPoint> ray_march(double px, double py, const CameraModel& cam) {
    const Eigen::Vector3d dir((px - cam.image_width / 2.0) * cam.pixel_size,
                              (py - cam.image_height / 2.0) * cam.pixel_size, cam.focal_length);
    double lo = 0.0, hi = 1.0;
    while (world_height(hi * dir, cam) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9) return std::nullopt;
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (world_height(mid * dir, cam) > 0.0 ? lo : hi) = mid;
    }
    const Eigen::Vector3d p = 0.5 * (lo + hi) * dir;
    return CameraPoint{p.x(), p.y(), p.z()};
}

// Footprint rectangle in ground coordinates (lateral, longitudinal).
struct GroundRect {
    Eigen::Vector2d center;
    double heading = 0.0;
    double length = 0.0;
    double width = 0.0;

    bool contains(const Eigen::Vector2d& q) const {
        const Eigen::Vector2d d = q - center;
        const Eigen::Vector2d u(std::cos(heading), std::sin(heading));
        const Eigen::Vector2d v(-u.y(), u.x());
        return std::abs(d.dot(u)) <= 0.5 * length && std::abs(d.dot(v)) <= 0.5 * width;
    }
    double radius() const { return 0.5 * std::hypot(length, width); }
};

inline GroundRect ground_rect(const skyground::geometry::Box3D& box, double pitch) {
    const Eigen::Vector3d lateral(1, 0, 0);
    const Eigen::Vector3d longitudinal(0, -std::sin(pitch), std::cos(pitch));
    const Eigen::Vector3d c = box.center.vec();
    return {{c.dot(lateral), c.dot(longitudinal)}, box.yaw, box.length, box.width};
}

inline double monte_carlo_iou(const GroundRect& a, const GroundRect& b, std::size_t samples, std::uint64_t seed) {
    const double x0 = std::min(a.center.x() - a.radius(), b.center.x() - b.radius());
    const double x1 = std::max(a.center.x() + a.radius(), b.center.x() + b.radius());
    const double y0 = std::min(a.center.y() - a.radius(), b.center.y() - b.radius());
    const double y1 = std::max(a.center.y() + a.radius(), b.center.y() + b.radius());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    std::size_t both = 0, either = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const Eigen::Vector2d q(ux(rng), uy(rng));
        const bool in_a = a.contains(q), in_b = b.contains(q);
        both += in_a && in_b;
        either += in_a || in_b;
    }
    return either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
}

// Nearest record by plain scan; the first record in (brand, model) order wins ties.
inline const skyground::vehicles::VehicleRecord* nearest_record(
    const std::vector<skyground::vehicles::VehicleRecord>& records, double l, double w, double h) {
    const skyground::vehicles::VehicleRecord* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        const double d = std::sqrt((r.length_mm - l) * (r.length_mm - l) + (r.width_mm - w) * (r.width_mm - w) +
                                   (r.height_mm - h) * (r.height_mm - h));
        if (d < best_d) {
            best_d = d;
            best = &r;
        }
    }
    return best;
}

// Random camera with the horizon outside the frame for pitch >= min_pitch_deg.
inline CameraModel random_camera(std::mt19937_64& rng, double min_pitch_deg = 20.0) {
    std::uniform_real_distribution<double> pitch(min_pitch_deg, 90.0), agl(5.0, 300.0), focal(4e-3, 25e-3),
        pix(1.5e-6, 6e-6);
    std::uniform_int_distribution<int> w(640, 8000), h(480, 6000);
    CameraModel cam;
    cam.focal_length = focal(rng);
    cam.pixel_size = pix(rng);
    cam.image_width = w(rng);
    cam.image_height = h(rng);
    cam.pitch = pitch(rng) * std::acos(-1.0) / 180.0;
    cam.agl = agl(rng);
    return cam;
}

}  // namespace oracle
