// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "skyground/bbox3d.hpp"
#include "skyground/camera_geometry.hpp"
#include "skyground/vehicle_table.hpp"

namespace skyground::eval {

struct AnnotatedObject {
    std::string id;
    geometry::OrientedBox2D obb;
    vehicles::DimensionsMm dims_mm;
    // Free-form attribute bag: brand, model, color, type, powertrain, doors,
    // seats, price. Values are strings or numbers.
    nlohmann::ordered_json attributes = nlohmann::ordered_json::object();

    geometry::Dimensions dims_m() const noexcept {
        return {dims_mm.length / 1000.0, dims_mm.width / 1000.0, dims_mm.height / 1000.0};
    }
    // Attribute rendered as text (numbers without trailing zeros); nullopt if absent.
    std::optional<std::string> attribute(const std::string& name) const;
};

struct AnnotationFile {
    std::string image;
    geometry::CameraModel camera;  // pitch in radians
    std::vector<AnnotatedObject> objects;

    const AnnotatedObject* find(const std::string& id) const noexcept;
};

/// Validates against the annotation schema and converts pitch and OBB
/// angles from degrees to radians. OBBs are normalized so that width is
/// the long side and the angle lies in [-pi/2, pi/2).
///
/// Throws SchemaError carrying a JSON pointer to the offending field.
AnnotationFile parse_annotations(const nlohmann::json& doc);
AnnotationFile load_annotations(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const AnnotationFile& file);

// Renders a number the way the harness and instruction files expect it.
std::string format_number(double value);

}  // namespace skyground::eval
