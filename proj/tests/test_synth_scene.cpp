// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include <numbers>

#include "skyground/synth_scene.hpp"

using namespace skyground;
using namespace skyground::synth;

TEST_CASE("empty scene is a valid annotation") {
    SceneConfig cfg;
    cfg.n_vehicles = 0;
    const auto scene = generate_scene(cfg, testutil::bundled_table());
    CHECK(scene.annotation.objects.empty());
    CHECK(scene.truth.empty());
    const auto back = eval::parse_annotations(nlohmann::json::parse(eval::to_json(scene.annotation).dump()));
    CHECK(back.objects.empty());
    CHECK(verify_roundtrip(scene.annotation, scene.truth).n == 0);
}

TEST_CASE("same seed gives byte-identical output") {
    SceneConfig cfg;
    cfg.seed = 1234;
    const auto table = testutil::bundled_table();
    const auto a = generate_scene(cfg, table);
    const auto b = generate_scene(cfg, table);
    CHECK(eval::to_json(a.annotation).dump() == eval::to_json(b.annotation).dump());
    CHECK(ground_truth_to_json(a.truth).dump() == ground_truth_to_json(b.truth).dump());
    cfg.seed = 1235;
    CHECK(eval::to_json(generate_scene(cfg, table).annotation).dump() != eval::to_json(a.annotation).dump());
}

TEST_CASE("emitted annotations validate and survive a JSON round trip") {
    SceneConfig cfg;
    cfg.seed = 9;
    const auto scene = generate_scene(cfg, testutil::bundled_table());
    REQUIRE(scene.annotation.objects.size() == 10);
    const auto back = eval::parse_annotations(nlohmann::json::parse(eval::to_json(scene.annotation).dump()));
    REQUIRE(back.objects.size() == 10);
    const auto stats = verify_roundtrip(back, scene.truth);
    CHECK(stats.max_center_error < 1e-6);
    CHECK(stats.min_bev_iou >= 1.0 - 1e-9);

    const auto gt = ground_truth_from_json(nlohmann::json::parse(ground_truth_to_json(scene.truth).dump()));
    REQUIRE(gt.size() == scene.truth.size());
    for (std::size_t i = 0; i < gt.size(); ++i) {
        CHECK(gt[i].id == scene.truth[i].id);
        CHECK(gt[i].box.center.x == scene.truth[i].box.center.x);
        CHECK(gt[i].box.yaw == scene.truth[i].box.yaw);
    }
}

TEST_CASE("footprints never overlap and every object comes from the table") {
    const auto table = testutil::bundled_table();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SceneConfig cfg;
        cfg.seed = seed;
        const auto scene = generate_scene(cfg, table);
        const auto& cam = scene.annotation.camera;
        for (std::size_t i = 0; i < scene.truth.size(); ++i) {
            for (std::size_t j = i + 1; j < scene.truth.size(); ++j) {
                CHECK(geometry::bev_iou(scene.truth[i].box, scene.truth[j].box, cam) == 0.0);
            }
            const auto& obj = scene.annotation.objects[i];
            const auto* rec = oracle::nearest_record(table.records(), obj.dims_mm.length, obj.dims_mm.width,
                                                     obj.dims_mm.height);
            REQUIRE(rec);
            CHECK(rec->length_mm == obj.dims_mm.length);
            CHECK(rec->width_mm == obj.dims_mm.width);
            CHECK(rec->height_mm == obj.dims_mm.height);
        }
    }
}

TEST_CASE("nadir OBB centers back-project onto the generating ground centers") {
    SceneConfig cfg;
    cfg.seed = 3;
    cfg.pitch_min_deg = cfg.pitch_max_deg = 90.0;
    for (auto fit : {ObbFit::Centered, ObbFit::MinArea}) {
        cfg.fit = fit;
        const auto scene = generate_scene(cfg, testutil::bundled_table());
        const auto& cam = scene.annotation.camera;
        for (std::size_t i = 0; i < scene.truth.size(); ++i) {
            const auto& obb = scene.annotation.objects[i].obb;
            const auto hit = oracle::ray_march(obb.cx, obb.cy, cam);
            REQUIRE(hit);
            const Eigen::Vector3d truth = scene.truth[i].box.ground_center(cam).vec();
            CHECK((hit->vec() - truth).norm() < 1e-6);
        }
    }
}

TEST_CASE("min-area fit drifts under oblique views") {
    SceneConfig cfg;
    cfg.seed = 5;
    cfg.pitch_min_deg = cfg.pitch_max_deg = 45.0;
    cfg.fit = ObbFit::MinArea;
    const auto scene = generate_scene(cfg, testutil::bundled_table());
    const auto stats = verify_roundtrip(scene.annotation, scene.truth);
    CHECK(stats.max_center_error > 1e-6);
    CHECK(stats.min_bev_iou > 0.25);
}

TEST_CASE("pitch perturbation errors grow with the perturbation") {
    SceneConfig cfg;
    cfg.seed = 11;
    cfg.pitch_min_deg = cfg.pitch_max_deg = 60.0;
    const auto scene = generate_scene(cfg, testutil::bundled_table());
    double prev_center = 0.0, prev_iou = 1.0;
    for (double deg : {0.25, 0.5, 1.0, 2.0}) {
        auto perturbed = scene.annotation;
        perturbed.camera.pitch += deg * std::numbers::pi / 180.0;
        const auto stats = verify_roundtrip(perturbed, scene.truth);
        CAPTURE(deg);
        CHECK(stats.max_center_error > prev_center);
        CHECK(stats.mean_bev_iou < prev_iou);
        prev_center = stats.max_center_error;
        prev_iou = stats.mean_bev_iou;
    }
}

TEST_CASE("crowded scenes exhaust placement") {
    SceneConfig cfg;
    cfg.n_vehicles = 50;
    cfg.ground_extent = 4.0;
    cfg.max_attempts = 50;
    CHECK_ERRC(generate_scene(cfg, testutil::bundled_table()), Errc::PlacementExhausted);
}

TEST_CASE("config and id checks") {
    const auto table = testutil::bundled_table();
    SceneConfig cfg;
    cfg.pitch_min_deg = 80;
    cfg.pitch_max_deg = 70;
    CHECK_ERRC(generate_scene(cfg, table), Errc::InvalidArgument);
    cfg = {};
    cfg.agl_min = -1;
    CHECK_ERRC(generate_scene(cfg, table), Errc::InvalidArgument);

    cfg = {};
    const auto scene = generate_scene(cfg, table);
    auto truth = scene.truth;
    truth.pop_back();
    CHECK_ERRC(verify_roundtrip(scene.annotation, truth), Errc::IdMismatch);
    truth = scene.truth;
    truth.front().id = "nobody";
    CHECK_ERRC(verify_roundtrip(scene.annotation, truth), Errc::IdMismatch);
}
