// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include <Eigen/Core>

#include "skyground/camera_geometry.hpp"
#include "skyground/polygon.hpp"

namespace skyground::geometry {

/// Annotated rotated 2D box. `width` runs along `angle` and is the long
/// side by convention; `angle` lies in [-pi/2, pi/2).
struct OrientedBox2D {
    double cx = 0.0;
    double cy = 0.0;
    double width = 0.0;
    double height = 0.0;
    double angle = 0.0;

    bool valid() const noexcept;
    std::array<PixelPoint, 4> corners() const noexcept;
};

struct HorizontalBox2D {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    bool valid() const noexcept { return x1 < x2 && y1 < y2; }
    double area() const noexcept { return (x2 - x1) * (y2 - y1); }
};

struct Dimensions {
    double length = 0.0;  // m
    double width = 0.0;   // m
    double height = 0.0;  // m
};

/// Vehicle cuboid resting on the ground plane. `center` is the geometric
/// center (half the height above the ground); `yaw` is the in-plane angle of
/// the length axis from GroundBasis::lateral toward GroundBasis::longitudinal,
/// reported modulo pi in [-pi/2, pi/2).
struct Box3D {
    CameraPoint center;
    double length = 0.0;
    double width = 0.0;
    double height = 0.0;
    double yaw = 0.0;

    CameraPoint ground_center(const CameraModel& cam) const noexcept;
};

// Right-handed orthonormal frame attached to the ground plane:
// lateral x longitudinal = normal.
struct GroundBasis {
    Eigen::Vector3d lateral;
    Eigen::Vector3d longitudinal;
    Eigen::Vector3d normal;  // toward the camera
};

GroundBasis ground_basis(const CameraModel& cam) noexcept;

// Wraps an angle into [-pi/2, pi/2).
double wrap_half_turn(double angle) noexcept;

/// Lifts an annotated OBB into a metric cuboid.
///
/// The ground center is the back-projection of the OBB center. Yaw comes
/// from back-projecting two probes offset by +-height/4 px along the OBB
/// long axis and measuring their in-plane displacement. `inflation` scales
/// all three dimensions.
///
/// Throws Error(RayMissesGround) or Error(DegenerateYaw).
Box3D derive_box3d(const OrientedBox2D& obb, const Dimensions& dims, const CameraModel& cam,
                   double inflation = 1.0);

// Bottom face first (counter-clockwise seen from above), then the top face
// in the same order.
std::array<CameraPoint, 8> box3d_corners(const Box3D& box, const CameraModel& cam);

struct ProjectedBox {
    std::array<PixelPoint, 8> corners_px;
    HorizontalBox2D hbb;
};

// Throws Error(NonPositiveDepth) when any corner is behind the camera.
ProjectedBox project_box3d(const Box3D& box, const CameraModel& cam);

// Footprint rectangle in (lateral, longitudinal) ground coordinates, CCW.
Polygon bev_footprint(const Box3D& box, const CameraModel& cam);

double bev_iou(const Box3D& a, const Box3D& b, const CameraModel& cam);
double hbb_iou(const HorizontalBox2D& a, const HorizontalBox2D& b) noexcept;
HorizontalBox2D obb_to_hbb(const OrientedBox2D& obb) noexcept;

}  // namespace skyground::geometry
