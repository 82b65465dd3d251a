// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "test_util.hpp"

#include <set>
#include <sstream>

#include "skyground/eval_harness.hpp"
#include "skyground/instruction_builder.hpp"
#include "skyground/location_format.hpp"
#include "skyground/synth_scene.hpp"

using namespace skyground;
using namespace skyground::instructions;

namespace {

TemplateSet bundled_templates() { return load_templates(std::string(SKYGROUND_DATA_DIR) + "/templates.json"); }

eval::AnnotationFile scene(std::size_t n, std::uint64_t seed = 1) {
    synth::SceneConfig cfg;
    cfg.n_vehicles = n;
    cfg.seed = seed;
    return synth::generate_scene(cfg, testutil::bundled_table()).annotation;
}

std::size_t count(const BuildResult& r, SampleKind k) {
    return static_cast<std::size_t>(
        std::count_if(r.samples.begin(), r.samples.end(), [&](const auto& s) { return s.kind == k; }));
}

}  // namespace

TEST_CASE("bundled templates satisfy the set invariants") {
    const auto t = bundled_templates();
    for (auto f : {LocationFormat::HBB, LocationFormat::OBB, LocationFormat::Box3D}) CHECK(t.grounding.at(f).size() == 5);
    CHECK(t.asl.size() == 5);
    CHECK(t.gml.size() == 5);
    for (auto task : kSqaTasks) CHECK_FALSE(t.sqa.at(task).empty());
}

TEST_CASE("template sets with the wrong counts are rejected") {
    auto t = bundled_templates();
    t.grounding[LocationFormat::OBB].pop_back();
    CHECK_ERRC(t.validate(), Errc::InvalidArgument);
    t = bundled_templates();
    t.sqa[SqaTask::Height].clear();
    CHECK_ERRC(t.validate(), Errc::InvalidArgument);
    t = bundled_templates();
    t.gml.push_back("extra {loc3d}");
    CHECK_ERRC(InstructionBuilder(t), Errc::InvalidArgument);
    CHECK_ERRC(parse_templates(nlohmann::json::parse(R"({"grounding": {}})")), Errc::InvalidArgument);
}

TEST_CASE("one object yields 15 grounding, 5 SQA and 20 phase-2 samples") {
    const auto rec = scene(1);
    const InstructionBuilder b(bundled_templates());
    const auto g = b.grounding(rec);
    CHECK(g.samples.size() == 15);
    CHECK(count(g, SampleKind::Ground2D) == 10);
    CHECK(count(g, SampleKind::Ground3D) == 5);
    CHECK(b.sqa(rec).samples.size() == 5);
    const auto p = b.phase2(rec);
    CHECK(p.samples.size() == 20);
    for (auto k : {SampleKind::Ground2D, SampleKind::Ground3D, SampleKind::ASL, SampleKind::GML}) CHECK(count(p, k) == 5);
}

TEST_CASE("phase-2 samples keep ASL aux equal to the sibling 2D target") {
    const auto rec = scene(3, 9);
    const auto p = InstructionBuilder(bundled_templates()).phase2(rec);
    // each template block is 2D, 3D, ASL, GML
    REQUIRE(p.samples.size() % 4 == 0);
    for (std::size_t i = 0; i < p.samples.size(); i += 4) {
        const auto& s2d = p.samples[i];
        const auto& s3d = p.samples[i + 1];
        const auto& asl = p.samples[i + 2];
        const auto& gml = p.samples[i + 3];
        CHECK(s2d.kind == SampleKind::Ground2D);
        CHECK(asl.kind == SampleKind::ASL);
        CHECK(asl.aux == s2d.target);
        CHECK(asl.target == s3d.target);
        CHECK_FALSE(gml.image);
        CHECK(gml.target == s2d.target);
        CHECK(gml.query.find(s3d.target) != std::string::npos);
    }
}

TEST_CASE("every sample passes check_sample") {
    const auto rec = scene(4, 2);
    BuildOptions opts;
    opts.aux_format = LocationFormat::OBB;
    opts.coords = CoordMode::Normalized1000;
    const InstructionBuilder b(bundled_templates(), opts);
    BuildResult all;
    all.append(b.grounding(rec));
    all.append(b.sqa(rec));
    all.append(b.phase2(rec));
    CHECK(all.samples.size() == 160);
    for (const auto& s : all.samples) {
        CAPTURE(s.to_json().dump());
        CHECK_FALSE(check_sample(s));
    }
}

TEST_CASE("SQA targets carry the ground-truth measures") {
    const auto rec = scene(2, 5);
    const auto r = InstructionBuilder(bundled_templates()).sqa(rec);
    REQUIRE(r.samples.size() == 10);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto truth = eval::sqa_ground_truth(rec.objects[i], rec.camera);
        for (std::size_t k = 0; k < 5; ++k) {
            const auto& s = r.samples[i * 5 + k];
            REQUIRE(s.task);
            CHECK(s.task == kSqaTasks[k]);
            CHECK(s.target == format_measure(truth.at(*s.task)));
            CHECK(*eval::extract_meters(s.target) == doctest::Approx(truth.at(*s.task)).epsilon(0.005));
        }
    }
}

TEST_CASE("referring expressions rank objects by distance") {
    const auto rec = scene(3, 12);
    const auto r = InstructionBuilder(bundled_templates()).grounding(rec);
    std::set<std::string> refs;
    for (const auto& s : r.samples) {
        for (const char* ord : {"the closest", "second closest", "third closest"}) {
            if (s.query.find(ord) != std::string::npos) refs.insert(ord);
        }
    }
    CHECK(refs.size() == 3);
}

TEST_CASE("objects whose ray misses the ground are skipped and counted") {
    auto rec = scene(2);
    rec.camera.pitch = geometry::deg_to_rad(5);
    rec.objects[0].obb.cy = 1;  // well above the horizon at 5 degrees
    rec.objects[1].obb.cy = 2500;
    const auto r = InstructionBuilder(bundled_templates()).grounding(rec);
    CHECK(r.skipped_objects == 1);
    CHECK(r.samples.size() == 15);
}

TEST_CASE("output is deterministic and serializes to JSONL") {
    const auto rec = scene(2, 3);
    const InstructionBuilder b(bundled_templates());
    std::ostringstream a, c;
    write_jsonl(a, b.phase2(rec).samples);
    write_jsonl(c, b.phase2(rec).samples);
    CHECK(a.str() == c.str());
    std::istringstream lines(a.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("query"));
        CHECK(j.contains("target"));
        CHECK(j.contains("kind"));
        if (j["kind"] == "GML") CHECK(j["image"].is_null());
        ++n;
    }
    CHECK(n == 40);
}

TEST_CASE("check_sample flags broken samples") {
    InstructionSample s{"img.png", "q", std::nullopt, "[1,2,3,4]", SampleKind::Ground2D, std::nullopt};
    CHECK_FALSE(check_sample(s));
    s.kind = SampleKind::Ground3D;
    CHECK(check_sample(s));
    s = {std::nullopt, "q", std::nullopt, "[1,2,3,4]", SampleKind::Ground2D, std::nullopt};
    CHECK(check_sample(s));
    s = {"img.png", "q", std::nullopt, "[1,2,3,4]", SampleKind::GML, std::nullopt};
    CHECK(check_sample(s));
    s = {"img.png", "q", std::nullopt, "about 12 m", SampleKind::SQA, std::nullopt};
    CHECK(check_sample(s));
    s.task = SqaTask::Depth;
    CHECK_FALSE(check_sample(s));
}
