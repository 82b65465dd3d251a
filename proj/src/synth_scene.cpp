// SPDX-License-Identifier: Apache-2.0
#include "skyground/synth_scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "skyground/error.hpp"
#include "skyground/polygon.hpp"

namespace skyground::synth {
namespace {

using geometry::Box3D;
using geometry::CameraModel;
using geometry::PixelPoint;
using geometry::Point2;

constexpr std::array<const char*, 6> kColors = {"white", "black", "silver", "gray", "red", "blue"};

std::string body_type(const vehicles::VehicleRecord& r) {
    if (r.height_mm >= 1600) return "SUV";
    if (r.length_mm < 4200) return "hatchback";
    return "sedan";
}

bool inside_frame(const PixelPoint& p, const CameraModel& cam) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= cam.image_width && p.y <= cam.image_height;
}

Point2 to_point(const PixelPoint& p) { return {p.x, p.y}; }

// Fits the annotation OBB around the projected bottom face. Returns
// nullopt when the projected length axis is not the long side, which would
// break the long-axis-is-length annotation convention.
std::optional<geometry::OrientedBox2D> fit_obb(const Box3D& box, const CameraModel& cam, ObbFit fit) {
    const auto corners = geometry::box3d_corners(box, cam);
    std::array<Point2, 4> bottom;
    for (std::size_t i = 0; i < 4; ++i) bottom[i] = to_point(geometry::project_to_pixel(corners[i], cam));

    geometry::OrientedBox2D obb;
    if (fit == ObbFit::MinArea) {
        auto rect = geometry::min_area_rect(bottom);
        // the rectangle side nearer the projected length axis becomes the width
        const geometry::GroundBasis basis = geometry::ground_basis(cam);
        const Eigen::Vector3d along = std::cos(box.yaw) * basis.lateral + std::sin(box.yaw) * basis.longitudinal;
        const Eigen::Vector3d g = box.ground_center(cam).vec();
        const Point2 axis = to_point(geometry::project_to_pixel(geometry::CameraPoint::from(g + along), cam)) -
                            to_point(geometry::project_to_pixel(geometry::CameraPoint::from(g - along), cam));
        const Point2 u(std::cos(rect.angle), std::sin(rect.angle));
        if (std::abs(u.dot(axis.normalized())) < std::sqrt(0.5)) {
            std::swap(rect.width, rect.height);
            rect.angle += std::numbers::pi / 2;
        }
        if (rect.width <= rect.height) return std::nullopt;
        obb = {rect.center.x(), rect.center.y(), rect.width, rect.height, geometry::wrap_half_turn(rect.angle)};
        return obb;
    }

    const geometry::GroundBasis basis = geometry::ground_basis(cam);
    const Eigen::Vector3d along = std::cos(box.yaw) * basis.lateral + std::sin(box.yaw) * basis.longitudinal;
    const Eigen::Vector3d g = box.ground_center(cam).vec();
    const Point2 c = to_point(geometry::project_to_pixel(box.ground_center(cam), cam));
    // front and back edge midpoints lie on the projected length axis through c
    const Point2 front = to_point(geometry::project_to_pixel(geometry::CameraPoint::from(g + 0.5 * box.length * along), cam));
    const Point2 back = to_point(geometry::project_to_pixel(geometry::CameraPoint::from(g - 0.5 * box.length * along), cam));
    const Point2 u = (front - back).normalized();
    const Point2 v(-u.y(), u.x());
    double half_u = 0.0, half_v = 0.0;
    for (const auto& p : bottom) {
        half_u = std::max(half_u, std::abs((p - c).dot(u)));
        half_v = std::max(half_v, std::abs((p - c).dot(v)));
    }
    if (half_u <= half_v) return std::nullopt;
    obb = {c.x(), c.y(), 2.0 * half_u, 2.0 * half_v, geometry::wrap_half_turn(std::atan2(u.y(), u.x()))};
    return obb;
}

}  // namespace

void SceneConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(Errc::InvalidArgument, "scene config: " + what); };
    if (!(pitch_min_deg > 0.0 && pitch_min_deg <= pitch_max_deg && pitch_max_deg <= 90.0)) {
        fail("pitch range must satisfy 0 < min <= max <= 90 degrees");
    }
    if (!(agl_min > 0.0 && agl_min <= agl_max)) fail("agl range must satisfy 0 < min <= max");
    if (!(ground_extent > 0.0)) fail("ground extent must be positive");
    if (image_width < 1 || image_height < 1) fail("image size must be positive");
    if (!(focal_length > 0.0 && pixel_size > 0.0)) fail("focal length and pixel size must be positive");
    if (max_attempts == 0) fail("max_attempts must be positive");
}

Scene generate_scene(const SceneConfig& cfg, const vehicles::VehicleTable& table) {
    cfg.validate();
    if (table.empty()) throw Error(Errc::EmptyTable, "scene generation needs a vehicle table");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    Scene scene;
    eval::AnnotationFile& ann = scene.annotation;
    ann.image = cfg.image_ref.empty() ? fmt::format("synthetic/scene_{}.png", cfg.seed) : cfg.image_ref;
    CameraModel& cam = ann.camera;
    cam.focal_length = cfg.focal_length;
    cam.pixel_size = cfg.pixel_size;
    cam.image_width = cfg.image_width;
    cam.image_height = cfg.image_height;
    // sampled in degrees so the annotation round-trips through the loader bit-exactly
    const double pitch_deg = uniform(cfg.pitch_min_deg, cfg.pitch_max_deg);
    cam.pitch = geometry::deg_to_rad(pitch_deg);
    cam.agl = uniform(cfg.agl_min, cfg.agl_max);
    cam.validate();

    const geometry::GroundBasis basis = geometry::ground_basis(cam);
    const Eigen::Vector3d anchor =
        geometry::backproject_to_ground({cam.image_width / 2.0, cam.image_height / 2.0}, cam).vec();

    // draw vehicles without replacement while the table lasts
    std::vector<std::size_t> order(table.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<geometry::Polygon> footprints;
    for (std::size_t k = 0; k < cfg.n_vehicles; ++k) {
        if (k > 0 && k % order.size() == 0) std::shuffle(order.begin(), order.end(), rng);
        const auto& rec = table.records()[order[k % order.size()]];
        const geometry::Dimensions dims{rec.length_mm / 1000.0, rec.width_mm / 1000.0, rec.height_mm / 1000.0};

        bool placed = false;
        for (std::size_t attempt = 0; attempt < cfg.max_attempts && !placed; ++attempt) {
            const double a = uniform(-cfg.ground_extent, cfg.ground_extent);
            const double b = uniform(-cfg.ground_extent, cfg.ground_extent);
            const double yaw = uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
            const Eigen::Vector3d ground = anchor + a * basis.lateral + b * basis.longitudinal;

            Box3D box;
            box.length = dims.length;
            box.width = dims.width;
            box.height = dims.height;
            box.yaw = geometry::wrap_half_turn(yaw);
            box.center = geometry::CameraPoint::from(ground + 0.5 * dims.height * basis.normal);

            const auto corners = geometry::box3d_corners(box, cam);
            if (!std::all_of(corners.begin(), corners.end(), [&](const auto& p) {
                    return p.z > 0.0 && inside_frame(geometry::project_to_pixel(p, cam), cam);
                })) {
                continue;
            }
            const geometry::Polygon fp = geometry::bev_footprint(box, cam);
            const bool overlaps = std::any_of(footprints.begin(), footprints.end(), [&](const auto& other) {
                return geometry::area(geometry::clip_convex(fp, other)) > 0.0;
            });
            if (overlaps) continue;
            const auto obb = fit_obb(box, cam, cfg.fit);
            if (!obb) continue;
            const auto obb_corners = obb->corners();
            const bool in_frame = std::all_of(obb_corners.begin(), obb_corners.end(),
                                              [&](const PixelPoint& p) { return inside_frame(p, cam); });
            if (!in_frame) continue;

            eval::AnnotatedObject obj;
            obj.id = fmt::format("v{}", k);
            obj.obb = *obb;
            obj.dims_mm = {rec.length_mm, rec.width_mm, rec.height_mm};
            obj.attributes["brand"] = rec.brand;
            obj.attributes["model"] = rec.model;
            obj.attributes["color"] = kColors[static_cast<std::size_t>(unit(rng) * kColors.size()) % kColors.size()];
            obj.attributes["type"] = body_type(rec);
            obj.attributes["powertrain"] = std::string(vehicles::to_string(rec.powertrain));
            obj.attributes["doors"] = rec.doors;
            obj.attributes["seats"] = rec.seats;
            obj.attributes["price"] = rec.price;
            ann.objects.push_back(std::move(obj));
            scene.truth.push_back({ann.objects.back().id, box});
            footprints.push_back(fp);
            placed = true;
        }
        if (!placed) {
            throw Error(Errc::PlacementExhausted,
                        fmt::format("could not place vehicle {} after {} attempts", k, cfg.max_attempts));
        }
    }
    return scene;
}

nlohmann::ordered_json ground_truth_to_json(std::span<const GroundTruthVehicle> truth) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : truth) {
        arr.push_back({{"id", t.id},
                       {"center", {t.box.center.x, t.box.center.y, t.box.center.z}},
                       {"length", t.box.length},
                       {"width", t.box.width},
                       {"height", t.box.height},
                       {"yaw_rad", t.box.yaw}});
    }
    return {{"vehicles", std::move(arr)}};
}

std::vector<GroundTruthVehicle> ground_truth_from_json(const nlohmann::json& doc) {
    std::vector<GroundTruthVehicle> out;
    try {
        for (const auto& v : doc.at("vehicles")) {
            GroundTruthVehicle t;
            t.id = v.at("id").get<std::string>();
            const auto& c = v.at("center");
            t.box.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
            t.box.length = v.at("length").get<double>();
            t.box.width = v.at("width").get<double>();
            t.box.height = v.at("height").get<double>();
            t.box.yaw = v.at("yaw_rad").get<double>();
            out.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("ground truth: ") + e.what());
    }
    return out;
}

nlohmann::ordered_json RoundtripStats::to_json() const {
    return {{"n", n},
            {"max_center_error_m", max_center_error},
            {"mean_center_error_m", mean_center_error},
            {"max_yaw_error_rad", max_yaw_error},
            {"mean_yaw_error_rad", mean_yaw_error},
            {"min_bev_iou", min_bev_iou},
            {"mean_bev_iou", mean_bev_iou}};
}

RoundtripStats verify_roundtrip(const eval::AnnotationFile& annotation,
                                std::span<const GroundTruthVehicle> truth, double inflation) {
    std::map<std::string, const GroundTruthVehicle*> by_id;
    for (const auto& t : truth) by_id.emplace(t.id, &t);
    if (by_id.size() != annotation.objects.size()) {
        throw Error(Errc::IdMismatch, "annotation and ground truth hold different vehicle counts");
    }
    RoundtripStats stats;
    double center_sum = 0.0, yaw_sum = 0.0, iou_sum = 0.0;
    for (const auto& obj : annotation.objects) {
        auto it = by_id.find(obj.id);
        if (it == by_id.end()) throw Error(Errc::IdMismatch, "no ground truth for object " + obj.id);
        const Box3D& gt = it->second->box;
        const Box3D derived = geometry::derive_box3d(obj.obb, obj.dims_m(), annotation.camera, inflation);
        const double center_err = (derived.center.vec() - gt.center.vec()).norm();
        const double yaw_err = std::abs(geometry::wrap_half_turn(derived.yaw - gt.yaw));
        const double iou = geometry::bev_iou(derived, gt, annotation.camera);
        stats.max_center_error = std::max(stats.max_center_error, center_err);
        stats.max_yaw_error = std::max(stats.max_yaw_error, yaw_err);
        stats.min_bev_iou = std::min(stats.min_bev_iou, iou);
        center_sum += center_err;
        yaw_sum += yaw_err;
        iou_sum += iou;
        ++stats.n;
    }
    if (stats.n > 0) {
        stats.mean_center_error = center_sum / stats.n;
        stats.mean_yaw_error = yaw_sum / stats.n;
        stats.mean_bev_iou = iou_sum / stats.n;
    }
    return stats;
}

}  // namespace skyground::synth
