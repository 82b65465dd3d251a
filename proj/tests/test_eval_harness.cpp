// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "test_util.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "skyground/bbox3d.hpp"
#include "skyground/eval_harness.hpp"
#include "skyground/location_format.hpp"
#include "skyground/synth_scene.hpp"

using namespace skyground;
using namespace skyground::eval;
using geometry::Box3D;
using geometry::HorizontalBox2D;

namespace {

std::vector<Prediction> preds_from(const std::string& jsonl) {
    std::istringstream in(jsonl);
    return parse_predictions(in);
}

AnnotationFile two_car_file() {
    return parse_annotations(nlohmann::json::parse(R"({
      "image": "x.jpg", "image_width": 4000, "image_height": 3000,
      "camera": {"focal_length_m": 0.0067, "pixel_size_m": 2.4e-6, "pitch_deg": 70, "agl_m": 45},
      "objects": [
        {"id": "a", "obb": {"cx": 1000, "cy": 1800, "w": 160, "h": 60, "angle_deg": 0},
         "dims_mm": {"length": 4694, "width": 1849, "height": 1443},
         "attributes": {"brand": "Tesla", "model": "Model 3", "color": "white", "doors": 4, "price": 40000}},
        {"id": "b", "obb": {"cx": 2500, "cy": 2200, "w": 170, "h": 70, "angle_deg": 30},
         "dims_mm": {"length": 4922, "width": 2004, "height": 1745},
         "attributes": {"brand": "BMW", "model": "X5", "color": "black", "doors": 5, "price": 66000}}
      ]})"));
}

}  // namespace

TEST_CASE("extract_numeric") {
    CHECK(extract_numeric("The depth is 34.2 meters.") == 34.2);
    CHECK(extract_numeric("about 1,200 mm") == 1200);
    CHECK(extract_numeric("I cannot tell.") == std::nullopt);
    CHECK(extract_numeric("-3.5 m") == -3.5);
    CHECK(extract_numeric("car ID-5 is 12 m away") == 5);
    CHECK(extract_numeric(".75") == 0.75);
    CHECK(extract_numeric("12,34") == 12);
    CHECK(extract_numeric("1,234,567.5") == 1234567.5);
}

TEST_CASE("extract_meters converts millimeter and centimeter answers") {
    CHECK(extract_meters("4694 mm") == doctest::Approx(4.694));
    CHECK(extract_meters("about 180 cm wide") == doctest::Approx(1.8));
    CHECK(extract_meters("4.69 m") == doctest::Approx(4.69));
    CHECK(extract_meters("1,443 millimeters") == doctest::Approx(1.443));
    // "mm" inside a word is not a unit
    CHECK(extract_meters("hmm, 12 m") == doctest::Approx(12));
}

TEST_CASE("grounding accuracy at 0.5") {
    const std::vector<HorizontalBox2D> gts{{0, 0, 2, 2}, {0, 0, 2, 2}};
    const std::vector<std::optional<HorizontalBox2D>> preds{HorizontalBox2D{0, 0, 2, 3}, HorizontalBox2D{1, 0, 3, 2}};
    // IoU 2/3 and 1/3
    CHECK(eval_grounding(preds, gts).accuracy == 0.5);
    const std::vector<std::optional<HorizontalBox2D>> same{gts[0], gts[1]};
    CHECK(eval_grounding(same, gts).accuracy == 1.0);
    const std::vector<std::optional<HorizontalBox2D>> missing{gts[0], std::nullopt};
    const auto s = eval_grounding(missing, gts);
    CHECK(s.accuracy == 0.5);
    CHECK(s.n_missing == 1);
    // IoU exactly 0.5 meets the threshold
    const std::vector<HorizontalBox2D> g1{{0, 0, 2, 1}};
    const std::vector<std::optional<HorizontalBox2D>> p1{HorizontalBox2D{0, 0, 1, 1}};
    CHECK(eval_grounding(p1, g1).accuracy == 1.0);
}

TEST_CASE("grounding argument checks") {
    const std::vector<HorizontalBox2D> gts{{0, 0, 2, 2}};
    const std::vector<std::optional<HorizontalBox2D>> none;
    CHECK_ERRC(eval_grounding(none, gts), Errc::LengthMismatch);
    const std::vector<std::optional<HorizontalBox2D>> one{gts[0]};
    CHECK_ERRC(eval_grounding(one, gts, 1.0), Errc::InvalidArgument);
    CHECK_ERRC(eval_grounding(one, gts, 0.0), Errc::InvalidArgument);
}

TEST_CASE("regression metrics") {
    const std::vector<double> gts{1, 2, 3, 4};
    const auto same = eval_regression(gts, gts);
    CHECK(same.mae == 0);
    CHECK(same.rmse == 0);
    CHECK(same.r_squared == 1.0);
    CHECK(same.acc_5pct == 1.0);

    const std::vector<double> shifted{2, 3, 4, 5};
    const auto m = eval_regression(shifted, gts);
    CHECK(m.mae == doctest::Approx(1).epsilon(1e-12));
    CHECK(m.rmse == doctest::Approx(1).epsilon(1e-12));
    CHECK(*m.r_squared == doctest::Approx(0.2).epsilon(1e-12));

    const std::vector<double> mean(4, 2.5);
    CHECK(*eval_regression(mean, gts).r_squared == 0.0);

    const std::vector<double> flat(3, 7.0), flat_pred{7, 8, 6};
    const auto f = eval_regression(flat_pred, flat);
    CHECK_FALSE(f.r_squared);
    CHECK(f.mae == doctest::Approx(2.0 / 3.0));

    CHECK_ERRC(eval_regression(std::vector<double>{}, std::vector<double>{}), Errc::InvalidArgument);
    CHECK_ERRC(eval_regression(shifted, flat), Errc::LengthMismatch);
}

TEST_CASE("five-point regression fixture file") {
    std::ifstream in(std::string(SKYGROUND_TEST_DIR) + "/fixtures/regression_5pt.json");
    REQUIRE(in);
    const auto j = nlohmann::json::parse(in);
    const auto gts = j["gts"].get<std::vector<double>>();
    const auto preds = j["preds"].get<std::vector<double>>();
    const auto m = eval_regression(preds, gts);
    CHECK(std::abs(m.mae - j["mae"].get<double>()) < 1e-9);
    CHECK(std::abs(m.rmse - j["rmse"].get<double>()) < 1e-9);
    CHECK(std::abs(*m.r_squared - j["r_squared"].get<double>()) < 1e-9);
}

TEST_CASE("the 5% rule is inclusive") {
    CHECK(within_tolerance(105, 100));
    CHECK(within_tolerance(95, 100));
    CHECK_FALSE(within_tolerance(105.1, 100));
    CHECK_FALSE(within_tolerance(94.9, 100));
    CHECK(within_tolerance(-10.5, -10));
}

TEST_CASE("retrieval is strict at 0.25") {
    const auto cam = testutil::nadir_camera();
    const auto basis = geometry::ground_basis(cam);
    const Eigen::Vector3d foot = -cam.agl * basis.normal;
    auto box_at = [&](double lat) {
        Box3D b;
        b.length = 4;
        b.width = 2;
        b.height = 1.5;
        b.center = geometry::CameraPoint::from(foot + lat * basis.lateral + 0.75 * basis.normal);
        return b;
    };
    const std::vector<Box3D> gts{box_at(0)};
    const std::vector<geometry::CameraModel> cams{cam};
    // shift 2.4 m along the length: overlap 1.6 of 4, IoU 1.6 / 6.4 = 0.25
    const std::vector<std::optional<Box3D>> edge{box_at(2.4)};
    CHECK(geometry::bev_iou(*edge[0], gts[0], cam) == doctest::Approx(0.25));
    const std::vector<std::optional<Box3D>> inside{box_at(2.3)};
    CHECK(eval_retrieval(inside, gts, cams).accuracy == 1.0);
    const std::vector<std::optional<Box3D>> outside{box_at(2.41)};
    CHECK(eval_retrieval(outside, gts, cams).accuracy == 0.0);
    const std::vector<std::optional<Box3D>> none{std::nullopt};
    CHECK(eval_retrieval(none, gts, cams).n_missing == 1);
    CHECK(eval_retrieval(std::vector<std::optional<Box3D>>{gts[0]}, gts, cams).accuracy == 1.0);
}

TEST_CASE("attribute matching") {
    CHECK(attribute_correct("BYD", "byd", AttributeKind::Categorical));
    CHECK(attribute_correct("  Model   3 ", "model 3", AttributeKind::Categorical));
    CHECK_FALSE(attribute_correct("Model Y", "Model 3", AttributeKind::Categorical));
    CHECK(attribute_correct("4 doors", "4", AttributeKind::Numeric));
    CHECK_FALSE(attribute_correct("four doors", "4", AttributeKind::Numeric));
    CHECK_FALSE(attribute_correct("40,100", "40000", AttributeKind::Price));
    CHECK(attribute_correct("40,100", "40000", AttributeKind::Price, 0.01));
    const std::vector<std::optional<std::string>> preds{"four doors", "5", std::nullopt};
    const std::vector<std::string> gts{"4", "5", "4"};
    const auto s = eval_attributes(preds, gts, AttributeKind::Numeric);
    CHECK(s.accuracy == doctest::Approx(1.0 / 3.0));
    CHECK(s.n_missing == 2);
    CHECK(attribute_kind("Price") == AttributeKind::Price);
    CHECK(attribute_kind("doors") == AttributeKind::Numeric);
    CHECK(attribute_kind("color") == AttributeKind::Categorical);
}

TEST_CASE("prediction files parse ids, tasks and locations") {
    const auto p = preds_from("{\"id\": \"a\", \"hbb\": [1,2,3,4]}\n\n{\"id\": 7, \"task\": \"depth\", \"answer\": \"3 m\"}\n");
    REQUIRE(p.size() == 2);
    CHECK(p[0].location == "[1,2,3,4]");
    CHECK(p[1].id == "7");
    CHECK(p[1].task == "depth");
    try {
        preds_from("{\"id\": \"a\"}\nnot json\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2u);
    }
}

TEST_CASE("evaluate_grounding over an annotation file") {
    const auto gt = two_car_file();
    const auto hbb_a = instructions::serialize(geometry::obb_to_hbb(gt.objects[0].obb));
    const auto r = evaluate_grounding(preds_from("{\"id\": \"a\", \"answer\": \"It is at " + hbb_a + ".\"}\n"), gt);
    const auto& m = r.metrics.at("grounding");
    CHECK(*m.acc_at_05 == 0.5);
    CHECK(m.n_evaluated == 2);
    CHECK(m.n_parse_failures == 1);
}

TEST_CASE("evaluate_sqa scores ground-truth answers as perfect") {
    const auto gt = two_car_file();
    std::string jsonl;
    for (const auto& obj : gt.objects) {
        for (const auto& [task, v] : sqa_ground_truth(obj, gt.camera)) {
            jsonl += nlohmann::json{{"id", obj.id},
                                    {"task", instructions::to_string(task)},
                                    {"answer", fmt::format("{:.6f} m", v)}}
                         .dump() +
                     "\n";
        }
    }
    const auto r = evaluate_sqa(preds_from(jsonl), gt);
    CHECK(r.metrics.size() == 5);
    for (const auto& [name, m] : r.metrics) {
        CAPTURE(name);
        CHECK(*m.acc_5pct == 1.0);
        CHECK(*m.mae < 1e-6);
        CHECK(m.n_parse_failures == 0);
    }
    const auto j = r.to_json();
    CHECK(j["task"] == "sqa");
    CHECK(j["metrics"]["depth"]["unit"] == "m");
    CHECK(r.to_table().find("distance") != std::string::npos);
}

TEST_CASE("evaluate_sqa counts missing answers as parse failures") {
    const auto gt = two_car_file();
    const auto r = evaluate_sqa(preds_from("{\"id\": \"a\", \"task\": \"length\", \"answer\": \"4694 mm\"}\n"), gt);
    const auto& len = r.metrics.at("length");
    CHECK(len.n_evaluated == 2);
    CHECK(len.n_parse_failures == 1);
    CHECK(*len.acc_5pct == 0.5);
    CHECK(*len.mae == doctest::Approx(0.0));
    CHECK_FALSE(r.metrics.at("depth").mae);
}

TEST_CASE("evaluate_attributes strips a leading attribute label") {
    const auto gt = two_car_file();
    const auto r = evaluate_attributes(preds_from(
                                           "{\"id\": \"a\", \"attribute\": \"brand\", \"answer\": \"brand: tesla\"}\n"
                                           "{\"id\": \"b\", \"attribute\": \"brand\", \"answer\": \"Audi\"}\n"
                                           "{\"id\": \"a\", \"attribute\": \"price\", \"answer\": \"$40,000\"}\n"),
                                       gt);
    CHECK(*r.metrics.at("brand").accuracy == 0.5);
    CHECK(*r.metrics.at("price").accuracy == 0.5);
    CHECK(r.metrics.at("price").n_parse_failures == 1);
}

TEST_CASE("evaluate_retrieval self-score is exactly 1") {
    synth::SceneConfig cfg;
    cfg.seed = 77;
    const auto scene = synth::generate_scene(cfg, testutil::bundled_table());
    std::string jsonl;
    for (const auto& t : scene.truth) {
        jsonl += nlohmann::json{{"id", t.id}, {"box3d", instructions::serialize(t.box)}}.dump() + "\n";
    }
    const auto r = evaluate_retrieval(preds_from(jsonl), scene.annotation);
    CHECK(*r.metrics.at("retrieval").acc_at_bev_025 == 1.0);
}
