// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include <random>
#include <sstream>

#include "skyground/vehicle_table.hpp"

using namespace skyground;
using namespace skyground::vehicles;

namespace {

constexpr const char* kHeaderLine = "brand,model,length_mm,width_mm,height_mm,powertrain,price,doors,seats\n";

VehicleTable parse(const std::string& text) {
    std::istringstream in(text);
    return parse_table(in);
}

std::optional<std::size_t> parse_error_row(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.row();
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("bundled table loads sorted by brand and model") {
    const auto t = testutil::bundled_table();
    REQUIRE(t.size() >= 20);
    for (std::size_t i = 1; i < t.size(); ++i) {
        const auto& a = t.records()[i - 1];
        const auto& b = t.records()[i];
        CHECK(std::tie(a.brand, a.model) < std::tie(b.brand, b.model));
    }
}

TEST_CASE("parse accepts whitespace, CRLF and case-insensitive enums") {
    const auto t = parse(std::string(kHeaderLine) + " Tesla , Model 3 ,4694,1849,1443, bev ,40000,4,5\r\n\nKia,EV6,4680,1880,1550,BEV,42000.5,5,5\n");
    REQUIRE(t.size() == 2);
    CHECK(t.records()[1].model == "Model 3");
    CHECK(t.records()[1].powertrain == Powertrain::BEV);
    CHECK(t.records()[0].price == 42000.5);
}

TEST_CASE("parse errors carry 1-based row numbers") {
    CHECK(parse_error_row("brand,model\nx,y\n") == 1u);
    CHECK(parse_error_row(std::string(kHeaderLine) + "A,B,4000,1800,1500,ICE,1,4,5\nA,C,-4000,1800,1500,ICE,1,4,5\n") == 3u);
    CHECK(parse_error_row(std::string(kHeaderLine) + "A,B,1700,1800,1500,ICE,1,4,5\n") == 2u);
    CHECK(parse_error_row(std::string(kHeaderLine) + "A,B,4000,1800,1500,steam,1,4,5\n") == 2u);
    CHECK(parse_error_row(std::string(kHeaderLine) + "A,B,4000,1800,1500,ICE,1,4\n") == 2u);
    CHECK(parse_error_row(std::string(kHeaderLine) + "A,B,4000,18x0,1500,ICE,1,4,5\n") == 2u);
    CHECK(parse_error_row("") == 1u);
}

TEST_CASE("empty tables and duplicate keys are rejected") {
    CHECK_ERRC(parse(kHeaderLine), Errc::EmptyTable);
    CHECK_ERRC(parse(std::string(kHeaderLine) + "Audi,A4,4762,1847,1435,ICE,1,4,5\naudi, a4 ,4000,1800,1400,ICE,1,4,5\n"),
               Errc::DuplicateKey);
    CHECK_ERRC(VehicleTable().match_dimensions({1, 1, 1}), Errc::EmptyTable);
}

TEST_CASE("exact dimensions return their own record") {
    const auto t = testutil::bundled_table();
    for (const auto& r : t.records()) {
        CHECK(&t.match_dimensions({r.length_mm, r.width_mm, r.height_mm}) == &r);
    }
}

TEST_CASE("matching agrees with a brute-force scan") {
    const auto t = testutil::bundled_table();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> l(3800, 5100), w(1700, 2050), h(1350, 1800);
    for (int i = 0; i < 500; ++i) {
        const double a = l(rng), b = w(rng), c = h(rng);
        CHECK(&t.match_dimensions({a, b, c}) == oracle::nearest_record(t.records(), a, b, c));
    }
}

TEST_CASE("ties go to the first record in sort order") {
    const auto t = parse(std::string(kHeaderLine) + "Zeta,Z,4100,1800,1500,ICE,1,4,5\nAlpha,A,4000,1800,1500,ICE,1,4,5\n");
    CHECK(t.match_dimensions({4050, 1800, 1500}).brand == "Alpha");
}

TEST_CASE("lookup is case-insensitive and reports missing vehicles") {
    const auto t = testutil::bundled_table();
    CHECK(t.lookup("tesla", "MODEL 3").length_mm == 4694);
    CHECK(t.lookup_name("  Tesla Model Y ").model == "Model Y");
    CHECK(t.lookup_name("Mercedes-Benz C-Class").brand == "Mercedes-Benz");
    CHECK_ERRC(t.lookup("Tesla", "Cybertruck"), Errc::NotFound);
    CHECK_ERRC(t.lookup_name("Tesla"), Errc::NotFound);
}

TEST_CASE("minimum gap matches the pairwise definition") {
    const auto t = parse(std::string(kHeaderLine) + "A,1,4000,1800,1500,ICE,1,4,5\nA,2,4003,1804,1500,ICE,1,4,5\nA,3,4500,1800,1500,ICE,1,4,5\n");
    CHECK(t.min_dimension_gap() == doctest::Approx(5.0));
}

TEST_CASE("write and parse round trip") {
    const auto t = parse(std::string(kHeaderLine) + "A,1,4000.5,1800,1500,PHEV,123456.78,4,5\nB,2,4100,1750,1480,other,0,2,2\n");
    std::ostringstream out;
    write_table(out, t);
    const auto back = parse(out.str());
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& a = t.records()[i];
        const auto& b = back.records()[i];
        CHECK(a.brand == b.brand);
        CHECK(a.model == b.model);
        CHECK(a.length_mm == b.length_mm);
        CHECK(a.price == b.price);
        CHECK(a.powertrain == b.powertrain);
        CHECK(a.seats == b.seats);
    }
}
