// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>

#include <fmt/format.h>

#include "skyground/agent.hpp"
#include "skyground/bbox3d.hpp"
#include "skyground/error.hpp"
#include "skyground/eval_harness.hpp"
#include "skyground/location_format.hpp"

namespace skyground::agent {
namespace {

// Prompt formats shared by the tools and MockVlm.
constexpr const char* kDimensionsPrompt =
    "Estimate the length, width and height of the vehicle at {}. Answer in millimeters.";
constexpr const char* kLocatePrompt =
    "Locate the vehicle whose length is {} mm, width is {} mm and height is {} mm. "
    "Answer with its 3D bounding box <Xc,Yc,Zc,L,W,H,yaw>.";
constexpr const char* kAttributePrompt = "What is the {} of the vehicle at {}?";

// Locate requests carry table dimensions; anything farther than this from
// every annotated vehicle is not in the scene.
constexpr double kLocateToleranceMm = 1.0;

const std::regex& locate_pattern() {
    static const std::regex re(
        R"(length is ([0-9.]+) mm, width is ([0-9.]+) mm and height is ([0-9.]+) mm)");
    return re;
}

std::string require_string(const Json& args, const char* key) {
    auto it = args.find(key);
    if (it == args.end() || !it->is_string()) {
        throw Error(Errc::InvalidArgument, std::string("missing string argument '") + key + "'");
    }
    return it->get<std::string>();
}

double require_number(const Json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw Error(Errc::InvalidArgument, std::string("missing numeric field '") + key + "'");
    }
    return it->get<double>();
}

// "length: 4.69 m" -> 4690. Millimeters unless the unit says otherwise.
std::optional<double> parse_dimension_mm(const std::string& text, const std::string& name) {
    const std::regex re(name + R"([^0-9]*?([0-9][0-9,]*(?:\.[0-9]+)?)\s*(mm|cm|m)?\b)", std::regex::icase);
    std::smatch m;
    if (!std::regex_search(text, m, re)) return std::nullopt;
    std::string digits = m.str(1);
    digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
    double v = std::stod(digits);
    const std::string unit = m.str(2);
    if (unit == "m") v *= 1000.0;
    if (unit == "cm") v *= 10.0;
    return v;
}

}  // namespace

std::string invoke_backend(Backend& backend, const std::string& prompt, const std::optional<std::string>& image) {
    if (backend.single_flight()) {
        std::lock_guard lock(backend.flight_mutex());
        return backend.invoke(prompt, image);
    }
    return backend.invoke(prompt, image);
}

std::string CallLog::call(Backend& backend, const std::string& prompt, const std::optional<std::string>& image) {
    std::string reply = invoke_backend(backend, prompt, image);
    exchanges.push_back({{"backend", backend.name()}, {"prompt", prompt}, {"response", reply}});
    return reply;
}

MockVlm::MockVlm(eval::AnnotationFile annotations, std::uint64_t seed, MockNoise noise, double inflation)
    : annotations_(std::move(annotations)), rng_(seed), noise_(noise), inflation_(inflation) {
    annotations_.camera.validate();
}

const eval::AnnotatedObject* MockVlm::object_at(std::string_view prompt) const {
    const auto loc = instructions::find_location(prompt);
    if (!loc) return nullptr;
    geometry::HorizontalBox2D query;
    if (auto* h = std::get_if<geometry::HorizontalBox2D>(&*loc)) {
        query = *h;
    } else if (auto* o = std::get_if<geometry::OrientedBox2D>(&*loc)) {
        query = geometry::obb_to_hbb(*o);
    } else {
        return nullptr;
    }
    const eval::AnnotatedObject* best = nullptr;
    double best_iou = 0.0;
    for (const auto& obj : annotations_.objects) {
        const double iou = geometry::hbb_iou(query, geometry::obb_to_hbb(obj.obb));
        if (iou > best_iou) {
            best_iou = iou;
            best = &obj;
        }
    }
    return best;
}

std::string MockVlm::invoke(const std::string& prompt, const std::optional<std::string>&) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::smatch m;
    if (std::regex_search(prompt, m, locate_pattern())) {
        const vehicles::DimensionsMm want{std::stod(m.str(1)), std::stod(m.str(2)), std::stod(m.str(3))};
        const eval::AnnotatedObject* best = nullptr;
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& obj : annotations_.objects) {
            const double d = std::hypot(obj.dims_mm.length - want.length, obj.dims_mm.width - want.width,
                                        obj.dims_mm.height - want.height);
            if (d < best_dist) {
                best_dist = d;
                best = &obj;
            }
        }
        if (!best || best_dist > kLocateToleranceMm) return "I cannot find such a vehicle.";
        geometry::Box3D box;
        try {
            box = geometry::derive_box3d(best->obb, best->dims_m(), annotations_.camera, inflation_);
        } catch (const Error&) {
            return "I cannot localize that vehicle.";
        }
        if (noise_.position_sigma_m > 0.0) {
            const auto basis = geometry::ground_basis(annotations_.camera);
            const double dl = noise_.position_sigma_m * gauss(rng_);
            const double dn = noise_.position_sigma_m * gauss(rng_);
            box.center = geometry::CameraPoint::from(box.center.vec() + dl * basis.lateral + dn * basis.longitudinal);
        }
        return "The vehicle is at " + instructions::serialize(box) + ".";
    }

    static const std::regex kAttribute(R"(What is the (\w+) of the vehicle at)");
    if (prompt.find("length, width and height") != std::string::npos) {
        const auto* obj = object_at(prompt);
        if (!obj) return "I cannot find a vehicle there.";
        auto jitter = [&](double v) {
            return noise_.dims_sigma_mm > 0.0 ? std::round(v + noise_.dims_sigma_mm * gauss(rng_)) : v;
        };
        const double l = jitter(obj->dims_mm.length);
        const double w = jitter(obj->dims_mm.width);
        const double h = jitter(obj->dims_mm.height);
        return fmt::format("length: {} mm, width: {} mm, height: {} mm", eval::format_number(l),
                           eval::format_number(w), eval::format_number(h));
    }
    if (std::regex_search(prompt, m, kAttribute)) {
        const auto* obj = object_at(prompt);
        if (!obj) return "I cannot find a vehicle there.";
        return obj->attribute(m.str(1)).value_or("unknown");
    }
    return "I cannot answer that.";
}

FixtureSearch::FixtureSearch(nlohmann::json fixture) : fixture_(nlohmann::json::object()) {
    if (!fixture.is_object()) throw Error(Errc::InvalidArgument, "search fixture must be a JSON object");
    for (auto& [key, value] : fixture.items()) fixture_[vehicles::fold_key(key)] = value;
}

FixtureSearch FixtureSearch::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    try {
        return FixtureSearch(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::InvalidArgument, std::string("search fixture: ") + e.what());
    }
}

std::string FixtureSearch::invoke(const std::string& prompt, const std::optional<std::string>&) {
    std::string key = vehicles::fold_key(prompt);
    if (key.size() > 6 && key.ends_with(" price")) key.resize(key.size() - 6);
    auto it = fixture_.find(key);
    if (it == fixture_.end()) return "No results found.";
    if (it->is_object() && it->contains("price")) {
        return "price: " + eval::format_number((*it)["price"].get<double>());
    }
    return it->is_string() ? it->get<std::string>() : it->dump();
}

Json record_to_json(const vehicles::VehicleRecord& r) {
    return {{"brand", r.brand},
            {"model", r.model},
            {"length_mm", r.length_mm},
            {"width_mm", r.width_mm},
            {"height_mm", r.height_mm},
            {"powertrain", std::string(vehicles::to_string(r.powertrain))},
            {"price", r.price},
            {"doors", r.doors},
            {"seats", r.seats}};
}

Json SpatialUnderstandingTool::run(const Json& args, const ToolContext& ctx, CallLog& log) {
    const std::string task = require_string(args, "task");
    if (task == "dimensions") {
        const std::string location = require_string(args, "location");
        const std::string reply = log.call(vlm_, fmt::format(kDimensionsPrompt, location), ctx.image);
        const auto l = parse_dimension_mm(reply, "length");
        const auto w = parse_dimension_mm(reply, "width");
        const auto h = parse_dimension_mm(reply, "height");
        if (!l || !w || !h) throw Error(Errc::ParseError, "no dimensions in VLM reply '" + reply + "'");
        return {{"length_mm", *l}, {"width_mm", *w}, {"height_mm", *h}};
    }
    if (task == "locate") {
        auto dims = args.find("dims");
        if (dims == args.end() || !dims->is_object()) throw Error(Errc::InvalidArgument, "locate needs dims");
        const std::string prompt =
            fmt::format(kLocatePrompt, eval::format_number(require_number(*dims, "length_mm")),
                        eval::format_number(require_number(*dims, "width_mm")),
                        eval::format_number(require_number(*dims, "height_mm")));
        const std::string reply = log.call(vlm_, prompt, ctx.image);
        const auto loc = instructions::find_location(reply);
        if (!loc || !std::holds_alternative<geometry::Box3D>(*loc)) {
            throw Error(Errc::ParseError, "no 3D box in VLM reply '" + reply + "'");
        }
        return {{"box3d", instructions::serialize(*loc)}};
    }
    throw Error(Errc::InvalidArgument, "unknown spatial_understanding task '" + task + "'");
}

Json ImageUnderstandingTool::run(const Json& args, const ToolContext& ctx, CallLog& log) {
    const std::string attribute = require_string(args, "attribute");
    const std::string location = require_string(args, "location");
    std::string reply = log.call(vlm_, fmt::format(kAttributePrompt, attribute, location), ctx.image);
    while (!reply.empty() && (reply.back() == '.' || std::isspace(static_cast<unsigned char>(reply.back())))) {
        reply.pop_back();
    }
    return {{"attribute", attribute}, {"value", reply}};
}

Json QueryTableTool::run(const Json& args, const ToolContext&, CallLog&) {
    const std::string op = require_string(args, "op");
    if (op == "match") {
        auto dims = args.find("dims");
        if (dims == args.end() || !dims->is_object()) throw Error(Errc::InvalidArgument, "match needs dims");
        const vehicles::DimensionsMm q{require_number(*dims, "length_mm"), require_number(*dims, "width_mm"),
                                       require_number(*dims, "height_mm")};
        return record_to_json(table_.match_dimensions(q));
    }
    if (op == "lookup") {
        if (args.contains("brand") && args.contains("model")) {
            return record_to_json(table_.lookup(require_string(args, "brand"), require_string(args, "model")));
        }
        return record_to_json(table_.lookup_name(require_string(args, "name")));
    }
    throw Error(Errc::InvalidArgument, "unknown query_table op '" + op + "'");
}

Json WebSearchTool::run(const Json& args, const ToolContext&, CallLog& log) {
    if (!search_) throw Error(Errc::ToolError, "no web search backend configured");
    std::string name;
    if (auto v = args.find("vehicle"); v != args.end() && v->is_object()) {
        name = require_string(*v, "brand") + " " + require_string(*v, "model");
    } else {
        name = require_string(args, "name");
    }
    const std::string reply = log.call(*search_, name + " price", std::nullopt);
    const auto price = eval::extract_numeric(reply);
    if (!price) throw Error(Errc::NotFound, "no price in search reply '" + reply + "'");
    return {{"price", *price}, {"source", "web"}};
}

void Toolbox::add(std::unique_ptr<Tool> tool) {
    const auto kind = tool->kind();
    tools_[kind] = std::move(tool);
}

Tool* Toolbox::find(ToolKind kind) const noexcept {
    auto it = tools_.find(kind);
    return it == tools_.end() ? nullptr : it->second.get();
}

}  // namespace skyground::agent
