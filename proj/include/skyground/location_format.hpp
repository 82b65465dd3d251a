// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "skyground/bbox3d.hpp"

namespace skyground::instructions {

using Location = std::variant<geometry::HorizontalBox2D, geometry::OrientedBox2D, geometry::Box3D>;

// Wire formats:
//   HBB    [x1,y1,x2,y2]              integer pixels
//   OBB    [cx,cy,w,h,angle_deg]      integer pixels / degrees
//   Box3D  <Xc,Yc,Zc,L,W,H,yaw_deg>   meters / degrees, two decimals
std::string serialize(const geometry::HorizontalBox2D& hbb);
std::string serialize(const geometry::OrientedBox2D& obb);
std::string serialize(const geometry::Box3D& box);
std::string serialize(const Location& loc);

// Throws ParseError on malformed text or an invalid box.
Location parse_location(std::string_view text);

// First bracketed or angle-bracketed location embedded in free text.
std::optional<Location> find_location(std::string_view text);

/// Pixel coordinate convention for 2D targets. Normalized mode divides every
/// pixel quantity by max(width, height) and scales to [0, 999], keeping
/// rotated boxes angle-preserving.
enum class CoordMode { Absolute, Normalized1000 };

struct PixelFrame {
    int image_width = 1;
    int image_height = 1;
    CoordMode mode = CoordMode::Absolute;

    double scale() const noexcept;
};

geometry::HorizontalBox2D to_frame(const geometry::HorizontalBox2D& hbb, const PixelFrame& frame) noexcept;
geometry::OrientedBox2D to_frame(const geometry::OrientedBox2D& obb, const PixelFrame& frame) noexcept;
geometry::HorizontalBox2D from_frame(const geometry::HorizontalBox2D& hbb, const PixelFrame& frame) noexcept;

}  // namespace skyground::instructions
