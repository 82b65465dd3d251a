// SPDX-License-Identifier: Apache-2.0
#include "skyground/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "skyground/agent.hpp"
#include "skyground/annotation.hpp"
#include "skyground/bbox3d.hpp"
#include "skyground/error.hpp"
#include "skyground/eval_harness.hpp"
#include "skyground/instruction_builder.hpp"
#include "skyground/location_format.hpp"
#include "skyground/polygon.hpp"
#include "skyground/synth_scene.hpp"
#include "skyground/vehicle_table.hpp"

#ifndef SKYGROUND_DATA_DIR
#define SKYGROUND_DATA_DIR "data"
#endif

namespace skyground::cli {
namespace {

using ojson = nlohmann::ordered_json;

// Flag combinations CLI11 cannot express; reported like parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Output {
    std::ostream& out;
    std::string path;

    void emit(const std::string& content) const {
        if (path.empty()) {
            out << content;
        } else {
            write_atomic(path, content);
        }
    }
};

struct CameraFlags {
    std::string annotations;
    double focal_length = 6.7e-3;
    double pixel_size = 2.4e-6;
    int width = 4000;
    int height = 3000;
    std::optional<double> pitch_deg;
    std::optional<double> agl;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--annotations", annotations, "Annotation JSON supplying the camera")->check(CLI::ExistingFile);
        cmd.add_option("--focal-m", focal_length, "Focal length in meters")->capture_default_str();
        cmd.add_option("--pixel-m", pixel_size, "Pixel size in meters")->capture_default_str();
        cmd.add_option("--width", width, "Image width in pixels")->capture_default_str();
        cmd.add_option("--height", height, "Image height in pixels")->capture_default_str();
        cmd.add_option("--pitch-deg", pitch_deg, "Camera pitch below the horizon, degrees");
        cmd.add_option("--agl", agl, "Height above ground, meters");
    }

    geometry::CameraModel camera() const {
        if (!annotations.empty()) return eval::load_annotations(annotations).camera;
        if (!pitch_deg || !agl) throw UsageError("camera needs --annotations or both --pitch-deg and --agl");
        geometry::CameraModel cam{focal_length, pixel_size, width, height, geometry::deg_to_rad(*pitch_deg), *agl};
        cam.validate();
        return cam;
    }
};

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_numbers(const std::string& text, std::size_t n, const char* what) {
    std::vector<double> v;
    std::string s = text;
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '[' || c == ']'; }, ' ');
    std::istringstream in(s);
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof() || v.size() != n) {
        throw UsageError(fmt::format("{} expects {} comma-separated numbers, got '{}'", what, n, text));
    }
    return v;
}

ojson box_json(const geometry::Box3D& box) {
    const auto m = geometry::spatial_measures(box.center);
    return {{"box3d", instructions::serialize(box)},
            {"center_m", {box.center.x, box.center.y, box.center.z}},
            {"length_m", box.length},
            {"width_m", box.width},
            {"height_m", box.height},
            {"yaw_deg", geometry::rad_to_deg(box.yaw)},
            {"depth_m", m.depth},
            {"distance_m", m.distance}};
}

geometry::Polygon obb_polygon(const geometry::OrientedBox2D& obb) {
    geometry::Polygon poly;
    for (const auto& c : obb.corners()) poly.emplace_back(c.x, c.y);
    geometry::make_ccw(poly);
    return poly;
}

double obb_iou(const geometry::OrientedBox2D& a, const geometry::OrientedBox2D& b) {
    const auto pa = obb_polygon(a);
    const auto pb = obb_polygon(b);
    const double inter = geometry::area(geometry::clip_convex(pa, pb));
    const double uni = geometry::area(pa) + geometry::area(pb) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

template <class T>
T parse_as(const std::string& text) {
    auto loc = instructions::parse_location(text);
    if (auto* v = std::get_if<T>(&loc)) return *v;
    throw UsageError("'" + text + "' is not the expected box format");
}

}  // namespace

std::filesystem::path data_dir() {
    if (const char* env = std::getenv("SKYGROUND_DATA_DIR")) return env;
    return SKYGROUND_DATA_DIR;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(Errc::IoError, "cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw Error(Errc::IoError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(Errc::IoError, "cannot rename onto " + path.string());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ground-plane 3D grounding toolkit for aerial vehicle imagery", "skyground"};
    app.require_subcommand(1, 1);
    std::string out_path;

    // derive3d
    auto* derive = app.add_subcommand("derive3d", "Lift oriented 2D boxes to 3D boxes on the ground plane");
    CameraFlags derive_cam;
    derive_cam.add_to(*derive);
    std::string derive_obb, derive_dims, derive_id;
    double derive_inflation = 1.0;
    derive->add_option("--obb", derive_obb, "Single OBB [cx,cy,w,h,angle_deg] instead of the annotation objects");
    derive->add_option("--dims-mm", derive_dims, "Dimensions L,W,H in mm for --obb");
    derive->add_option("--id", derive_id, "Only this annotation object");
    derive->add_option("--inflation", derive_inflation, "OBB inflation ratio")->capture_default_str();
    derive->add_option("--out", out_path, "Output file (default: standard output)");

    // project
    auto* project = app.add_subcommand("project", "Project a 3D box into the image");
    CameraFlags project_cam;
    project_cam.add_to(*project);
    std::string project_box;
    project->add_option("--box3d", project_box, "<Xc,Yc,Zc,L,W,H,yaw_deg>")->required();
    project->add_option("--out", out_path, "Output file (default: standard output)");

    // iou
    auto* iou = app.add_subcommand("iou", "IoU of two HBBs, two OBBs or the BEV IoU of two 3D boxes");
    CameraFlags iou_cam;
    iou_cam.add_to(*iou);
    std::vector<std::string> iou_hbb, iou_obb, iou_box;
    iou->add_option("--hbb", iou_hbb, "[x1,y1,x2,y2], given twice")->allow_extra_args(false);
    iou->add_option("--obb", iou_obb, "[cx,cy,w,h,angle_deg], given twice")->allow_extra_args(false);
    iou->add_option("--box3d", iou_box, "<Xc,Yc,Zc,L,W,H,yaw_deg>, given twice (needs a camera)")->allow_extra_args(false);

    // match
    auto* match = app.add_subcommand("match", "Nearest vehicle record by dimensions");
    std::string match_table = (data_dir() / "vehicles.csv").string();
    std::string match_dims, match_format = "json";
    match->add_option("--table", match_table, "Vehicle table CSV")->capture_default_str();
    match->add_option("--dims", match_dims, "L,W,H in mm")->required();
    match->add_option("--format", match_format, "json|table")->check(CLI::IsMember({"json", "table"}));
    match->add_option("--out", out_path, "Output file (default: standard output)");

    // build-instr
    auto* build = app.add_subcommand("build-instr", "Generate instruction samples as JSONL");
    std::vector<std::string> build_annotations;
    std::string build_templates = (data_dir() / "templates.json").string();
    std::string build_phase = "all", build_aux = "hbb", build_coords = "absolute";
    double build_inflation = 1.0;
    build->add_option("--annotations", build_annotations, "Annotation JSON files")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--templates", build_templates, "Template file")->capture_default_str();
    build->add_option("--phase", build_phase, "grounding|sqa|phase2|all")
        ->check(CLI::IsMember({"grounding", "sqa", "phase2", "all"}))
        ->capture_default_str();
    build->add_option("--aux-format", build_aux, "2D format of phase-2 samples: hbb|obb")
        ->check(CLI::IsMember({"hbb", "obb"}));
    build->add_option("--coords", build_coords, "absolute|norm1000")->check(CLI::IsMember({"absolute", "norm1000"}));
    build->add_option("--inflation", build_inflation, "OBB inflation ratio")->capture_default_str();
    build->add_option("--out", out_path, "Output JSONL (default: standard output)");

    // eval
    auto* evalc = app.add_subcommand("eval", "Score predictions against annotations");
    std::string eval_task, eval_pred, eval_gt, eval_format = "json";
    eval::EvalOptions eval_opts;
    std::optional<double> eval_price_tol;
    evalc->add_option("--task", eval_task, "grounding|sqa|retrieval|attribute")
        ->required()
        ->check(CLI::IsMember({"grounding", "sqa", "retrieval", "attribute"}));
    evalc->add_option("--pred", eval_pred, "Predictions JSONL")->required()->check(CLI::ExistingFile);
    evalc->add_option("--gt", eval_gt, "Annotation JSON")->required()->check(CLI::ExistingFile);
    evalc->add_option("--format", eval_format, "json|table")->check(CLI::IsMember({"json", "table"}));
    evalc->add_option("--threshold", eval_opts.grounding_threshold, "Grounding IoU threshold")->capture_default_str();
    evalc->add_option("--price-tol", eval_price_tol, "Relative tolerance for price answers");
    evalc->add_option("--inflation", eval_opts.inflation, "OBB inflation ratio for GT 3D boxes");
    evalc->add_option("--out", out_path, "Output file (default: standard output)");

    // synth
    auto* synthc = app.add_subcommand("synth", "Generate synthetic annotated scenes with 3D ground truth");
    synth::SceneConfig synth_cfg;
    std::size_t synth_n = 1;
    std::optional<double> synth_pitch, synth_agl;
    std::string synth_table = (data_dir() / "vehicles.csv").string();
    std::string synth_dir, synth_fit = "centered";
    synthc->add_option("--n", synth_n, "Number of scenes")->capture_default_str();
    synthc->add_option("--vehicles", synth_cfg.n_vehicles, "Vehicles per scene")->capture_default_str();
    synthc->add_option("--pitch-deg", synth_pitch, "Fixed pitch (default: uniform in [45, 90])");
    synthc->add_option("--agl", synth_agl, "Fixed height above ground (default: uniform in [40, 100])");
    synthc->add_option("--extent", synth_cfg.ground_extent, "Half-size of the placement area, m")->capture_default_str();
    synthc->add_option("--seed", synth_cfg.seed, "Seed of the first scene; scene i uses seed + i")->capture_default_str();
    synthc->add_option("--table", synth_table, "Vehicle table CSV")->capture_default_str();
    synthc->add_option("--fit", synth_fit, "OBB fit: centered|min-area")->check(CLI::IsMember({"centered", "min-area"}));
    synthc->add_option("--out", synth_dir, "Output directory")->required();

    // agent run
    auto* agentc = app.add_subcommand("agent", "Tool-calling agent");
    agentc->require_subcommand(1, 1);
    auto* agent_run = agentc->add_subcommand("run", "Answer one query about an image");
    std::string agent_image, agent_query, agent_backend = "mock", agent_annotations, agent_trace;
    std::string agent_table = (data_dir() / "vehicles.csv").string();
    std::string agent_url, agent_planner_url, agent_search_url, agent_search_fixture;
    std::string agent_prompt = (data_dir() / "planner_prompt.txt").string();
    std::string agent_planner, agent_summarizer = "template";
    std::uint64_t agent_seed = 0;
    agent::MockNoise agent_noise;
    agent::HttpOptions http_opts;
    int http_timeout_ms = 30000;
    agent_run->add_option("--image", agent_image, "Image path");
    agent_run->add_option("--query", agent_query, "Question")->required();
    agent_run->add_option("--backend", agent_backend, "mock|http")->check(CLI::IsMember({"mock", "http"}));
    agent_run->add_option("--annotations", agent_annotations, "Annotations backing the mock VLM")
        ->check(CLI::ExistingFile);
    agent_run->add_option("--table", agent_table, "Vehicle table CSV")->capture_default_str();
    agent_run->add_option("--trace", agent_trace, "Write the JSON trace here");
    agent_run->add_option("--seed", agent_seed, "Mock noise seed")->capture_default_str();
    agent_run->add_option("--dims-noise-mm", agent_noise.dims_sigma_mm, "Mock dimension noise sigma, mm");
    agent_run->add_option("--position-noise-m", agent_noise.position_sigma_m, "Mock position noise sigma, m");
    agent_run->add_option("--planner", agent_planner, "keyword|llm (default: keyword for mock, llm for http)")
        ->check(CLI::IsMember({"keyword", "llm"}));
    agent_run->add_option("--summarizer", agent_summarizer, "template|llm")->check(CLI::IsMember({"template", "llm"}));
    agent_run->add_option("--prompt", agent_prompt, "Planner prompt template")->capture_default_str();
    agent_run->add_option("--url", agent_url, "HTTP VLM endpoint");
    agent_run->add_option("--planner-url", agent_planner_url, "HTTP planner endpoint (default: --url)");
    agent_run->add_option("--search-url", agent_search_url, "HTTP search endpoint");
    agent_run->add_option("--search-fixture", agent_search_fixture, "Search answers from a JSON fixture")
        ->check(CLI::ExistingFile);
    agent_run->add_option("--timeout-ms", http_timeout_ms, "HTTP timeout")->capture_default_str();
    agent_run->add_option("--retries", http_opts.retries, "HTTP retries")->capture_default_str();
    agent_run->add_flag("--embed-image", http_opts.embed_image, "Send base64 image contents over HTTP");
    agent_run->add_option("--out", out_path, "Output file (default: standard output)");

    auto usage = [&](const std::string& msg) {
        err << "usage error: " << msg << "\n\n";
        const auto selected = app.get_subcommands();
        err << (selected.empty() ? app.help() : selected.back()->help());
        return kExitUsage;
    };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    const Output output{out, out_path};
    try {
        if (derive->parsed()) {
            const auto cam = derive_cam.camera();
            ojson result = ojson::array();
            if (!derive_obb.empty()) {
                if (derive_dims.empty()) throw UsageError("--obb needs --dims-mm");
                const auto d = parse_numbers(derive_dims, 3, "--dims-mm");
                const auto obb = parse_as<geometry::OrientedBox2D>(derive_obb);
                const auto box = geometry::derive_box3d(obb, {d[0] / 1000, d[1] / 1000, d[2] / 1000}, cam,
                                                        derive_inflation);
                output.emit(dump(box_json(box)));
                return kExitOk;
            }
            if (derive_cam.annotations.empty()) throw UsageError("derive3d needs --annotations or --obb");
            const auto file = eval::load_annotations(derive_cam.annotations);
            for (const auto& obj : file.objects) {
                if (!derive_id.empty() && obj.id != derive_id) continue;
                ojson row = {{"id", obj.id}};
                try {
                    row.update(box_json(geometry::derive_box3d(obj.obb, obj.dims_m(), cam, derive_inflation)));
                } catch (const Error& e) {
                    row["error"] = e.what();
                }
                result.push_back(std::move(row));
            }
            if (!derive_id.empty() && result.empty()) throw Error(Errc::NotFound, "no object with id " + derive_id);
            output.emit(dump(result));
        } else if (project->parsed()) {
            const auto cam = project_cam.camera();
            const auto proj = geometry::project_box3d(parse_as<geometry::Box3D>(project_box), cam);
            ojson corners = ojson::array();
            for (const auto& c : proj.corners_px) corners.push_back({c.x, c.y});
            output.emit(dump({{"hbb", instructions::serialize(proj.hbb)}, {"corners_px", corners}}));
        } else if (iou->parsed()) {
            const int kinds = !iou_hbb.empty() + !iou_obb.empty() + !iou_box.empty();
            if (kinds != 1) throw UsageError("give exactly one of --hbb, --obb, --box3d (twice)");
            double v = 0.0;
            if (!iou_hbb.empty()) {
                if (iou_hbb.size() != 2) throw UsageError("--hbb must be given twice");
                v = geometry::hbb_iou(parse_as<geometry::HorizontalBox2D>(iou_hbb[0]),
                                      parse_as<geometry::HorizontalBox2D>(iou_hbb[1]));
            } else if (!iou_obb.empty()) {
                if (iou_obb.size() != 2) throw UsageError("--obb must be given twice");
                v = obb_iou(parse_as<geometry::OrientedBox2D>(iou_obb[0]),
                            parse_as<geometry::OrientedBox2D>(iou_obb[1]));
            } else {
                if (iou_box.size() != 2) throw UsageError("--box3d must be given twice");
                v = geometry::bev_iou(parse_as<geometry::Box3D>(iou_box[0]), parse_as<geometry::Box3D>(iou_box[1]),
                                      iou_cam.camera());
            }
            out << fmt::format("{:.4f}\n", v);
        } else if (match->parsed()) {
            const auto table = vehicles::load_table(match_table);
            const auto d = parse_numbers(match_dims, 3, "--dims");
            const auto& rec = table.match_dimensions({d[0], d[1], d[2]});
            const double dist = std::hypot(rec.length_mm - d[0], rec.width_mm - d[1], rec.height_mm - d[2]);
            if (match_format == "table") {
                output.emit(fmt::format("{:<16} {:<18} {:>6} {:>6} {:>6} {:>10}\n{:<16} {:<18} {:>6} {:>6} {:>6} {:>10.1f}\n",
                                        "brand", "model", "L_mm", "W_mm", "H_mm", "dist_mm", rec.brand, rec.model,
                                        eval::format_number(rec.length_mm), eval::format_number(rec.width_mm),
                                        eval::format_number(rec.height_mm), dist));
            } else {
                ojson j = agent::record_to_json(rec);
                j["distance_mm"] = dist;
                output.emit(dump(j));
            }
        } else if (build->parsed()) {
            instructions::BuildOptions opts;
            opts.aux_format = build_aux == "obb" ? instructions::LocationFormat::OBB : instructions::LocationFormat::HBB;
            opts.coords = build_coords == "norm1000" ? instructions::CoordMode::Normalized1000
                                                     : instructions::CoordMode::Absolute;
            opts.inflation = build_inflation;
            const instructions::InstructionBuilder builder(instructions::load_templates(build_templates), opts);
            instructions::BuildResult all;
            for (const auto& path : build_annotations) {
                const auto record = eval::load_annotations(path);
                if (build_phase == "grounding" || build_phase == "all") all.append(builder.grounding(record));
                if (build_phase == "sqa" || build_phase == "all") all.append(builder.sqa(record));
                if (build_phase == "phase2" || build_phase == "all") all.append(builder.phase2(record));
            }
            std::ostringstream jsonl;
            instructions::write_jsonl(jsonl, all.samples);
            output.emit(jsonl.str());
            err << fmt::format("{} samples, {} object(s) skipped\n", all.samples.size(), all.skipped_objects);
        } else if (evalc->parsed()) {
            eval_opts.price_tol = eval_price_tol;
            const auto gt = eval::load_annotations(eval_gt);
            const auto preds = eval::load_predictions(eval_pred);
            eval::EvalReport report;
            if (eval_task == "grounding") report = eval::evaluate_grounding(preds, gt, eval_opts);
            if (eval_task == "sqa") report = eval::evaluate_sqa(preds, gt);
            if (eval_task == "retrieval") report = eval::evaluate_retrieval(preds, gt, eval_opts);
            if (eval_task == "attribute") report = eval::evaluate_attributes(preds, gt, eval_opts);
            output.emit(eval_format == "table" ? report.to_table() : dump(report.to_json()));
        } else if (synthc->parsed()) {
            if (synth_pitch) synth_cfg.pitch_min_deg = synth_cfg.pitch_max_deg = *synth_pitch;
            if (synth_agl) synth_cfg.agl_min = synth_cfg.agl_max = *synth_agl;
            synth_cfg.fit = synth_fit == "min-area" ? synth::ObbFit::MinArea : synth::ObbFit::Centered;
            const auto table = vehicles::load_table(synth_table);
            std::filesystem::create_directories(synth_dir);
            ojson summary = ojson::array();
            const auto first_seed = synth_cfg.seed;
            for (std::size_t i = 0; i < synth_n; ++i) {
                synth::SceneConfig cfg = synth_cfg;
                cfg.seed = first_seed + i;
                const auto scene = synth::generate_scene(cfg, table);
                const auto stem = std::filesystem::path(synth_dir) / fmt::format("scene_{}", cfg.seed);
                const auto ann_path = stem.string() + ".json";
                const auto gt_path = stem.string() + ".gt.json";
                write_atomic(ann_path, dump(eval::to_json(scene.annotation)));
                write_atomic(gt_path, dump(synth::ground_truth_to_json(scene.truth)));
                summary.push_back({{"seed", cfg.seed},
                                   {"annotations", ann_path},
                                   {"ground_truth", gt_path},
                                   {"roundtrip", synth::verify_roundtrip(scene.annotation, scene.truth).to_json()}});
            }
            out << dump(summary);
        } else if (agent_run->parsed()) {
            const auto table = vehicles::load_table(agent_table);
            http_opts.timeout = std::chrono::milliseconds(http_timeout_ms);
            std::unique_ptr<agent::Backend> vlm;
            std::unique_ptr<agent::Backend> planner_backend;
            std::unique_ptr<agent::Backend> search;
            if (agent_backend == "mock") {
                if (agent_annotations.empty()) throw UsageError("--backend mock needs --annotations");
                vlm = std::make_unique<agent::MockVlm>(eval::load_annotations(agent_annotations), agent_seed,
                                                       agent_noise);
            } else {
                if (agent_url.empty()) throw UsageError("--backend http needs --url");
                vlm = std::make_unique<agent::HttpBackend>(
                    agent_url, std::set{agent::Capability::Vlm, agent::Capability::Summarizer}, http_opts);
            }
            if (agent_planner.empty()) agent_planner = agent_backend == "mock" ? "keyword" : "llm";
            if (agent_planner == "llm" || agent_summarizer == "llm") {
                const std::string url = agent_planner_url.empty() ? agent_url : agent_planner_url;
                if (url.empty()) throw UsageError("an LLM planner or summarizer needs --planner-url or --url");
                planner_backend = std::make_unique<agent::HttpBackend>(
                    url, std::set{agent::Capability::Planner, agent::Capability::Summarizer}, http_opts);
            }
            if (!agent_search_fixture.empty()) {
                std::ifstream in(agent_search_fixture);
                search = std::make_unique<agent::FixtureSearch>(nlohmann::json::parse(in));
            } else if (!agent_search_url.empty()) {
                search = std::make_unique<agent::HttpSearch>(agent_search_url, http_opts);
            }

            agent::Toolbox toolbox;
            toolbox.add(std::make_unique<agent::SpatialUnderstandingTool>(*vlm));
            toolbox.add(std::make_unique<agent::ImageUnderstandingTool>(*vlm));
            toolbox.add(std::make_unique<agent::QueryTableTool>(table));
            toolbox.add(std::make_unique<agent::WebSearchTool>(search.get()));

            std::unique_ptr<agent::Planner> planner;
            if (agent_planner == "llm") {
                planner = std::make_unique<agent::LlmPlanner>(*planner_backend, agent::load_text(agent_prompt));
            } else {
                planner = std::make_unique<agent::KeywordPlanner>();
            }
            std::unique_ptr<agent::Summarizer> summarizer;
            if (agent_summarizer == "llm") {
                summarizer = std::make_unique<agent::LlmSummarizer>(*planner_backend);
            } else {
                summarizer = std::make_unique<agent::TemplateSummarizer>();
            }

            agent::Agent agent(*planner, toolbox, *summarizer);
            const std::optional<std::string> image =
                agent_image.empty() ? std::nullopt : std::optional<std::string>(agent_image);
            const auto result = agent.run_query(image, agent_query);
            if (!agent_trace.empty()) write_atomic(agent_trace, result.trace.dump() + "\n");
            output.emit(dump({{"query", agent_query}, {"answer", result.answer}, {"ok", result.ok}}));
            return result.ok ? kExitOk : kExitDomain;
        }
    } catch (const UsageError& e) {
        return usage(e.what());
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}

}  // namespace skyground::cli
