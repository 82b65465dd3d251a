// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyground/annotation.hpp"
#include "skyground/bbox3d.hpp"
#include "skyground/vehicle_table.hpp"

namespace skyground::synth {

/// How the annotated OBB is fitted around the projected vehicle footprint.
///
/// Centered: the box is centered on the projected ground center, aligned
/// with the projected length axis, and just large enough to cover the four
/// projected bottom corners. Under oblique views this keeps the OBB center
/// on the vehicle center.
///
/// MinArea: minimum-area rectangle of the four projected bottom corners.
/// Identical to Centered at nadir; its center drifts under oblique views.
enum class ObbFit { Centered, MinArea };

struct SceneConfig {
    std::size_t n_vehicles = 10;
    double ground_extent = 20.0;  // m, half-size of the placement square
    double pitch_min_deg = 45.0;
    double pitch_max_deg = 90.0;
    double agl_min = 40.0;  // m
    double agl_max = 100.0;
    std::uint64_t seed = 0;
    int image_width = 4000;
    int image_height = 3000;
    double focal_length = 6.7e-3;  // m
    double pixel_size = 2.4e-6;    // m
    ObbFit fit = ObbFit::Centered;
    std::size_t max_attempts = 2000;  // per vehicle
    std::string image_ref;            // defaults to synthetic/scene_<seed>.png

    void validate() const;
};

struct GroundTruthVehicle {
    std::string id;
    geometry::Box3D box;
};

struct Scene {
    eval::AnnotationFile annotation;
    std::vector<GroundTruthVehicle> truth;
};

/// Places vehicles drawn from `table` on the ground plane by rejection
/// sampling (no footprint overlap, whole cuboid inside the frame) and emits
/// the annotation produced by forward projection.
///
/// Throws Error(PlacementExhausted) when a vehicle cannot be placed within
/// `max_attempts` draws.
Scene generate_scene(const SceneConfig& cfg, const vehicles::VehicleTable& table);

nlohmann::ordered_json ground_truth_to_json(std::span<const GroundTruthVehicle> truth);
std::vector<GroundTruthVehicle> ground_truth_from_json(const nlohmann::json& doc);

struct RoundtripStats {
    std::size_t n = 0;
    double max_center_error = 0.0;  // m
    double mean_center_error = 0.0;
    double max_yaw_error = 0.0;  // rad, modulo pi
    double mean_yaw_error = 0.0;
    double min_bev_iou = 1.0;
    double mean_bev_iou = 1.0;

    nlohmann::ordered_json to_json() const;
};

// Re-derives every annotated object and compares it with the generating
// pose. Throws Error(IdMismatch) when the id sets differ.
RoundtripStats verify_roundtrip(const eval::AnnotationFile& annotation,
                                std::span<const GroundTruthVehicle> truth, double inflation = 1.0);

}  // namespace skyground::synth
