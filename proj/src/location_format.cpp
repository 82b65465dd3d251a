// SPDX-License-Identifier: Apache-2.0
#include "skyground/location_format.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>
#include <regex>
#include <vector>

#include <fmt/format.h>

#include "skyground/error.hpp"

namespace skyground::instructions {
namespace {

using geometry::rad_to_deg;

long long to_int(double v) { return std::llround(v); }

// Formats with two decimals and folds "-0.00" to "0.00".
std::string fixed2(double v) {
    std::string s = fmt::format("{:.2f}", v);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::vector<double> parse_numbers(std::string_view body, std::string_view original) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t comma = body.find(',', pos);
        if (comma == std::string_view::npos) comma = body.size();
        std::string_view field = body.substr(pos, comma - pos);
        while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
        while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
        if (!field.empty() && field.front() == '+') field.remove_prefix(1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
            throw ParseError("malformed number in location '" + std::string(original) + "'");
        }
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

}  // namespace

std::string serialize(const geometry::HorizontalBox2D& hbb) {
    return fmt::format("[{},{},{},{}]", to_int(hbb.x1), to_int(hbb.y1), to_int(hbb.x2), to_int(hbb.y2));
}

std::string serialize(const geometry::OrientedBox2D& obb) {
    return fmt::format("[{},{},{},{},{}]", to_int(obb.cx), to_int(obb.cy), to_int(obb.width),
                       to_int(obb.height), to_int(rad_to_deg(obb.angle)));
}

std::string serialize(const geometry::Box3D& box) {
    return fmt::format("<{},{},{},{},{},{},{}>", fixed2(box.center.x), fixed2(box.center.y),
                       fixed2(box.center.z), fixed2(box.length), fixed2(box.width),
                       fixed2(box.height), fixed2(rad_to_deg(box.yaw)));
}

std::string serialize(const Location& loc) {
    return std::visit([](const auto& l) { return serialize(l); }, loc);
}

Location parse_location(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.size() < 2) throw ParseError("empty location");

    const char open = text.front(), close = text.back();
    const auto nums = parse_numbers(text.substr(1, text.size() - 2), text);
    if (open == '[' && close == ']') {
        if (nums.size() == 4) {
            geometry::HorizontalBox2D hbb{nums[0], nums[1], nums[2], nums[3]};
            if (!hbb.valid()) throw ParseError("HBB requires x1 < x2 and y1 < y2: '" + std::string(text) + "'");
            return hbb;
        }
        if (nums.size() == 5) {
            geometry::OrientedBox2D obb{nums[0], nums[1], nums[2], nums[3], geometry::deg_to_rad(nums[4])};
            if (!(obb.width > 0 && obb.height > 0)) throw ParseError("OBB requires positive size");
            if (obb.width < obb.height) {
                std::swap(obb.width, obb.height);
                obb.angle += std::numbers::pi / 2;
            }
            obb.angle = geometry::wrap_half_turn(obb.angle);
            return obb;
        }
    } else if (open == '<' && close == '>' && nums.size() == 7) {
        geometry::Box3D box;
        box.center = {nums[0], nums[1], nums[2]};
        box.length = nums[3];
        box.width = nums[4];
        box.height = nums[5];
        box.yaw = geometry::wrap_half_turn(geometry::deg_to_rad(nums[6]));
        if (!(box.length > 0 && box.width > 0 && box.height > 0)) {
            throw ParseError("Box3D requires positive dimensions");
        }
        return box;
    }
    throw ParseError("unrecognized location '" + std::string(text) + "'");
}

std::optional<Location> find_location(std::string_view text) {
    static const std::regex kPattern(R"(\[[^\[\]<>]*\]|<[^\[\]<>]*>)");
    const std::string s(text);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), kPattern); it != std::sregex_iterator(); ++it) {
        try {
            return parse_location(it->str());
        } catch (const ParseError&) {
        }
    }
    return std::nullopt;
}

double PixelFrame::scale() const noexcept {
    if (mode == CoordMode::Absolute) return 1.0;
    return 999.0 / std::max(image_width, image_height);
}

geometry::HorizontalBox2D to_frame(const geometry::HorizontalBox2D& hbb, const PixelFrame& frame) noexcept {
    const double s = frame.scale();
    return {hbb.x1 * s, hbb.y1 * s, hbb.x2 * s, hbb.y2 * s};
}

geometry::OrientedBox2D to_frame(const geometry::OrientedBox2D& obb, const PixelFrame& frame) noexcept {
    const double s = frame.scale();
    return {obb.cx * s, obb.cy * s, obb.width * s, obb.height * s, obb.angle};
}

geometry::HorizontalBox2D from_frame(const geometry::HorizontalBox2D& hbb, const PixelFrame& frame) noexcept {
    const double s = frame.scale();
    return {hbb.x1 / s, hbb.y1 / s, hbb.x2 / s, hbb.y2 / s};
}

}  // namespace skyground::instructions
