// SPDX-License-Identifier: Apache-2.0
#include "skyground/camera_geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "skyground/error.hpp"

namespace skyground::geometry {

bool CameraModel::valid() const noexcept {
    return std::isfinite(focal_length) && focal_length > 0.0 && std::isfinite(pixel_size) &&
           pixel_size > 0.0 && image_width >= 1 && image_height >= 1 && std::isfinite(pitch) &&
           pitch > 0.0 && pitch <= std::numbers::pi / 2 && std::isfinite(agl) && agl > 0.0;
}

void CameraModel::validate() const {
    auto fail = [](const std::string& what) { throw Error(Errc::InvalidArgument, "camera: " + what); };
    if (!(std::isfinite(focal_length) && focal_length > 0.0)) fail("focal_length must be > 0");
    if (!(std::isfinite(pixel_size) && pixel_size > 0.0)) fail("pixel_size must be > 0");
    if (image_width < 1 || image_height < 1) fail("image dimensions must be >= 1");
    if (!(std::isfinite(pitch) && pitch > 0.0 && pitch <= std::numbers::pi / 2))
        fail("pitch must lie in (0, pi/2]");
    if (!(std::isfinite(agl) && agl > 0.0)) fail("agl must be > 0");
}

ImagePoint pixel_to_image(PixelPoint pt, const CameraModel& cam) noexcept {
    return {(pt.x - cam.image_width / 2.0) * cam.pixel_size,
            (pt.y - cam.image_height / 2.0) * cam.pixel_size};
}

PixelPoint image_to_pixel(ImagePoint pt, const CameraModel& cam) noexcept {
    return {pt.x / cam.pixel_size + cam.image_width / 2.0,
            pt.y / cam.pixel_size + cam.image_height / 2.0};
}

PixelPoint project_to_pixel(const CameraPoint& pt, const CameraModel& cam) {
    if (!(pt.z > 0.0)) {
        throw Error(Errc::NonPositiveDepth,
                    "point depth " + std::to_string(pt.z) + " is not in front of the camera");
    }
    const double f = cam.focal_length;
    return image_to_pixel({f * pt.x / pt.z, f * pt.y / pt.z}, cam);
}

CameraPoint backproject_to_ground(PixelPoint pt, const CameraModel& cam, double epsilon) {
    const ImagePoint ip = pixel_to_image(pt, cam);
    const double f = cam.focal_length;
    const double d = ip.y * std::cos(cam.pitch) + f * std::sin(cam.pitch);
    if (!(d > epsilon)) {
        throw Error(Errc::RayMissesGround, "pixel (" + std::to_string(pt.x) + ", " +
                                               std::to_string(pt.y) +
                                               ") lies at or above the horizon");
    }
    const double t = cam.agl / d;
    return {ip.x * t, ip.y * t, f * t};
}

double plane_residual(const CameraPoint& pt, const CameraModel& cam) noexcept {
    return -std::cos(cam.pitch) * pt.y - std::sin(cam.pitch) * pt.z + cam.agl;
}

Eigen::Vector3d ground_normal(const CameraModel& cam) noexcept {
    return Eigen::Vector3d(0.0, -std::cos(cam.pitch), -std::sin(cam.pitch)).normalized();
}

SpatialMeasures spatial_measures(const CameraPoint& pt) noexcept {
    return {pt.z, std::sqrt(pt.x * pt.x + pt.y * pt.y + pt.z * pt.z)};
}

double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

}  // namespace skyground::geometry
