// SPDX-License-Identifier: Apache-2.0
#include "skyground/annotation.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "skyground/error.hpp"

namespace skyground::eval {
namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& ptr) {
    if (!obj.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(ptr + "/" + key, "required field is missing");
    return *it;
}

double require_number(const json& obj, const std::string& key, const std::string& ptr) {
    const json& v = require(obj, key, ptr);
    if (!v.is_number()) throw SchemaError(ptr + "/" + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(ptr + "/" + key, "expected a finite number");
    return d;
}

double require_positive(const json& obj, const std::string& key, const std::string& ptr) {
    const double d = require_number(obj, key, ptr);
    if (!(d > 0.0)) throw SchemaError(ptr + "/" + key, "must be > 0");
    return d;
}

int require_dimension(const json& obj, const std::string& key) {
    const json& v = require(obj, key, "");
    if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw SchemaError("/" + key, "expected a positive integer");
    }
    return v.get<int>();
}

}  // namespace

std::string format_number(double value) {
    if (value == std::floor(value) && std::abs(value) < 1e15) {
        return fmt::format("{}", static_cast<long long>(value));
    }
    return fmt::format("{}", value);
}

std::optional<std::string> AnnotatedObject::attribute(const std::string& name) const {
    auto it = attributes.find(name);
    if (it == attributes.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number()) return format_number(it->get<double>());
    if (it->is_boolean()) return it->get<bool>() ? "true" : "false";
    return it->dump();
}

const AnnotatedObject* AnnotationFile::find(const std::string& id) const noexcept {
    for (const auto& o : objects) {
        if (o.id == id) return &o;
    }
    return nullptr;
}

AnnotationFile parse_annotations(const json& doc) {
    if (!doc.is_object()) throw SchemaError("/", "annotation root must be an object");
    AnnotationFile out;

    const json& image = require(doc, "image", "");
    if (!image.is_string()) throw SchemaError("/image", "expected a string");
    out.image = image.get<std::string>();

    out.camera.image_width = require_dimension(doc, "image_width");
    out.camera.image_height = require_dimension(doc, "image_height");
    const json& cam = require(doc, "camera", "");
    if (!cam.is_object()) throw SchemaError("/camera", "expected an object");
    out.camera.focal_length = require_positive(cam, "focal_length_m", "/camera");
    out.camera.pixel_size = require_positive(cam, "pixel_size_m", "/camera");
    const double pitch_deg = require_number(cam, "pitch_deg", "/camera");
    if (!(pitch_deg > 0.0 && pitch_deg <= 90.0)) throw SchemaError("/camera/pitch_deg", "must lie in (0, 90]");
    out.camera.pitch = geometry::deg_to_rad(pitch_deg);
    out.camera.agl = require_positive(cam, "agl_m", "/camera");

    const json& objects = require(doc, "objects", "");
    if (!objects.is_array()) throw SchemaError("/objects", "expected an array");
    const double w = out.camera.image_width, h = out.camera.image_height;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const std::string ptr = "/objects/" + std::to_string(i);
        const json& o = objects[i];
        if (!o.is_object()) throw SchemaError(ptr, "expected an object");
        AnnotatedObject obj;

        const json& id = require(o, "id", ptr);
        if (id.is_string()) {
            obj.id = id.get<std::string>();
        } else if (id.is_number_integer()) {
            obj.id = std::to_string(id.get<long long>());
        } else {
            throw SchemaError(ptr + "/id", "expected a string or integer");
        }
        if (obj.id.empty()) throw SchemaError(ptr + "/id", "must not be empty");
        if (!seen.insert(obj.id).second) throw SchemaError(ptr + "/id", "duplicate object id");

        const std::string obb_ptr = ptr + "/obb";
        const json& obb = require(o, "obb", ptr);
        obj.obb.cx = require_number(obb, "cx", obb_ptr);
        obj.obb.cy = require_number(obb, "cy", obb_ptr);
        double bw = require_positive(obb, "w", obb_ptr);
        double bh = require_positive(obb, "h", obb_ptr);
        double angle = geometry::deg_to_rad(require_number(obb, "angle_deg", obb_ptr));
        if (bw < bh) {
            std::swap(bw, bh);
            angle += std::numbers::pi / 2;
        }
        obj.obb.width = bw;
        obj.obb.height = bh;
        obj.obb.angle = geometry::wrap_half_turn(angle);
        const auto hbb = geometry::obb_to_hbb(obj.obb);
        if (hbb.x1 < -0.1 * w || hbb.y1 < -0.1 * h || hbb.x2 > 1.1 * w || hbb.y2 > 1.1 * h) {
            throw SchemaError(obb_ptr, "box lies outside the image beyond the 10% margin");
        }

        const std::string dims_ptr = ptr + "/dims_mm";
        const json& dims = require(o, "dims_mm", ptr);
        obj.dims_mm.length = require_positive(dims, "length", dims_ptr);
        obj.dims_mm.width = require_positive(dims, "width", dims_ptr);
        obj.dims_mm.height = require_positive(dims, "height", dims_ptr);
        if (obj.dims_mm.length < obj.dims_mm.width) {
            throw SchemaError(dims_ptr + "/length", "length must be >= width");
        }

        if (auto it = o.find("attributes"); it != o.end()) {
            if (!it->is_object()) throw SchemaError(ptr + "/attributes", "expected an object");
            obj.attributes = nlohmann::ordered_json(*it);
        }
        out.objects.push_back(std::move(obj));
    }
    return out;
}

AnnotationFile load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("/", std::string("invalid JSON: ") + e.what());
    }
    return parse_annotations(doc);
}

nlohmann::ordered_json to_json(const AnnotationFile& file) {
    nlohmann::ordered_json doc;
    doc["image"] = file.image;
    doc["image_width"] = file.camera.image_width;
    doc["image_height"] = file.camera.image_height;
    doc["camera"] = {{"focal_length_m", file.camera.focal_length},
                     {"pixel_size_m", file.camera.pixel_size},
                     {"pitch_deg", geometry::rad_to_deg(file.camera.pitch)},
                     {"agl_m", file.camera.agl}};
    auto objects = nlohmann::ordered_json::array();
    for (const auto& o : file.objects) {
        nlohmann::ordered_json j;
        j["id"] = o.id;
        j["obb"] = {{"cx", o.obb.cx},
                    {"cy", o.obb.cy},
                    {"w", o.obb.width},
                    {"h", o.obb.height},
                    {"angle_deg", geometry::rad_to_deg(o.obb.angle)}};
        j["dims_mm"] = {{"length", o.dims_mm.length},
                        {"width", o.dims_mm.width},
                        {"height", o.dims_mm.height}};
        j["attributes"] = o.attributes;
        objects.push_back(std::move(j));
    }
    doc["objects"] = std::move(objects);
    return doc;
}

}  // namespace skyground::eval
