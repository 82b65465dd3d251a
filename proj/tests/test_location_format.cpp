// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "test_util.hpp"

#include <numbers>

#include "skyground/location_format.hpp"

using namespace skyground;
using namespace skyground::geometry;
using namespace skyground::instructions;

TEST_CASE("HBB serializes as rounded integers and round trips") {
    const HorizontalBox2D h{10.4, 20.6, 30.5, 40};
    CHECK(serialize(h) == "[10,21,31,40]");
    const auto back = std::get<HorizontalBox2D>(parse_location("[10,21,31,40]"));
    CHECK(serialize(back) == "[10,21,31,40]");
}

TEST_CASE("OBB serializes the angle in degrees") {
    const OrientedBox2D o{100, 200, 60, 20, std::numbers::pi / 6};
    CHECK(serialize(o) == "[100,200,60,20,30]");
    const auto back = std::get<OrientedBox2D>(parse_location(" [100, 200, 60, 20, 30] "));
    CHECK(back.angle == doctest::Approx(std::numbers::pi / 6));
}

TEST_CASE("OBB parsing normalizes width >= height") {
    const auto o = std::get<OrientedBox2D>(parse_location("[0,0,20,60,0]"));
    CHECK(o.width == 60);
    CHECK(o.height == 20);
    CHECK(o.angle == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("Box3D uses two decimals and folds negative zero") {
    Box3D b;
    b.center = {-0.001, 1.234, 55.557};
    b.length = 4.694;
    b.width = 1.849;
    b.height = 1.443;
    b.yaw = -1e-9;
    CHECK(serialize(b) == "<0.00,1.23,55.56,4.69,1.85,1.44,0.00>");
    const auto back = std::get<Box3D>(parse_location(serialize(b)));
    CHECK(back.center.z == doctest::Approx(55.56));
    CHECK(serialize(back) == serialize(b));
}

TEST_CASE("Box3D parsing wraps yaw") {
    const auto b = std::get<Box3D>(parse_location("<1,2,3,4,2,1.5,120>"));
    CHECK(b.yaw == doctest::Approx(deg_to_rad(-60)));
}

TEST_CASE("malformed locations raise ParseError") {
    for (const char* bad : {"", "[]", "[1,2,3]", "[1,2,3,4,5,6]", "[3,0,1,2]", "[0,0,0,0]", "<1,2,3>",
                            "<1,2,3,4,5,6,7", "[1,2,x,4]", "[1,,3,4]", "(1,2,3,4)", "[0,0,-1,2,0]",
                            "<1,2,3,0,1,1,0>", "[1,2,3,inf]"}) {
        CAPTURE(bad);
        CHECK_ERRC(parse_location(bad), Errc::ParseError);
    }
}

TEST_CASE("find_location takes the first parseable span") {
    const auto loc = find_location("The car [sic] is at [1,2,3,4] or maybe <1,1,1,4,2,1,0>.");
    REQUIRE(loc);
    CHECK(std::holds_alternative<HorizontalBox2D>(*loc));
    CHECK(find_location("It is at <5.5,1,30,4.6,1.8,1.4,12.00>")->index() == 2);
    CHECK_FALSE(find_location("no box here"));
}

TEST_CASE("normalized frame scales the long side to 999") {
    const PixelFrame f{4000, 3000, CoordMode::Normalized1000};
    const auto h = to_frame(HorizontalBox2D{0, 0, 4000, 3000}, f);
    CHECK(serialize(h) == "[0,0,999,749]");
    const auto back = from_frame(h, f);
    CHECK(back.x2 == doctest::Approx(4000));
    CHECK(PixelFrame{10, 10, CoordMode::Absolute}.scale() == 1.0);
}
