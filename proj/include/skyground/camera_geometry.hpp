// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

namespace skyground::geometry {

// Denominator tolerance (meters) below which a pixel ray is treated as
// parallel to, or pointing away from, the ground plane.
inline constexpr double kHorizonEpsilon = 1e-9;

/// Pinhole camera with zero roll/yaw, pitched down by `pitch` radians from
/// horizontal (pi/2 is nadir) at `agl` meters above a flat ground plane.
///
/// Camera frame: X right, Y down in the image, Z along the optical axis.
struct CameraModel {
    double focal_length = 0.0;  // m
    double pixel_size = 0.0;    // m
    int image_width = 0;        // px
    int image_height = 0;       // px
    double pitch = 0.0;         // rad
    double agl = 0.0;           // m

    bool valid() const noexcept;
    // Throws Error(InvalidArgument) naming the first violated invariant.
    void validate() const;
};

// Pixel coordinates, origin at the top-left corner, y pointing down.
struct PixelPoint {
    double x = 0.0;
    double y = 0.0;
};

// Sensor-plane coordinates in meters, origin at the principal point.
struct ImagePoint {
    double x = 0.0;
    double y = 0.0;
};

struct CameraPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
    static CameraPoint from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

struct SpatialMeasures {
    double depth = 0.0;     // z_c
    double distance = 0.0;  // Euclidean norm from the camera center
};

ImagePoint pixel_to_image(PixelPoint pt, const CameraModel& cam) noexcept;
PixelPoint image_to_pixel(ImagePoint pt, const CameraModel& cam) noexcept;

// Throws Error(NonPositiveDepth) when pt.z <= 0.
PixelPoint project_to_pixel(const CameraPoint& pt, const CameraModel& cam);

/// Intersects the viewing ray of `pt` with the ground plane
/// -cos(pitch)*Y - sin(pitch)*Z + agl = 0.
///
/// The ray is X = x_i*t, Y = y_i*t, Z = f*t; substituting gives
/// t = agl / (y_i*cos(pitch) + f*sin(pitch)). Pixels whose denominator is
/// not above `epsilon` sit at or above the horizon and raise
/// Error(RayMissesGround).
CameraPoint backproject_to_ground(PixelPoint pt, const CameraModel& cam,
                                  double epsilon = kHorizonEpsilon);

// Signed ground-plane equation value; zero on the plane, `agl` at the camera.
double plane_residual(const CameraPoint& pt, const CameraModel& cam) noexcept;

// Unit normal of the ground plane pointing from the ground toward the camera.
Eigen::Vector3d ground_normal(const CameraModel& cam) noexcept;

SpatialMeasures spatial_measures(const CameraPoint& pt) noexcept;

double deg_to_rad(double deg) noexcept;
double rad_to_deg(double rad) noexcept;

}  // namespace skyground::geometry
