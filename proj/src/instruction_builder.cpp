// SPDX-License-Identifier: Apache-2.0
#include "skyground/instruction_builder.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "skyground/error.hpp"
#include "skyground/eval_harness.hpp"

namespace skyground::instructions {
namespace {

using nlohmann::json;

std::string fill(std::string tmpl, const std::map<std::string, std::string>& vars) {
    for (const auto& [key, value] : vars) {
        const std::string token = "{" + key + "}";
        for (std::size_t pos = tmpl.find(token); pos != std::string::npos;
             pos = tmpl.find(token, pos + value.size())) {
            tmpl.replace(pos, token.size(), value);
        }
    }
    return tmpl;
}

std::string ordinal(std::size_t n) {
    static constexpr std::array<const char*, 10> kWords = {
        "",        "",       "second", "third",  "fourth",
        "fifth",   "sixth",  "seventh", "eighth", "ninth"};
    if (n == 1) return "";
    if (n < kWords.size()) return std::string(kWords[n]) + " ";
    const char* suffix = (n % 100 >= 11 && n % 100 <= 13) ? "th"
                         : n % 10 == 1                   ? "st"
                         : n % 10 == 2                   ? "nd"
                         : n % 10 == 3                   ? "rd"
                                                         : "th";
    return fmt::format("{}{} ", n, suffix);
}

std::vector<std::string> string_list(const json& doc, const std::string& key, const std::string& ptr) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_array()) {
        throw Error(Errc::InvalidArgument, "templates: " + ptr + "/" + key + " must be an array");
    }
    std::vector<std::string> out;
    for (const auto& s : *it) {
        if (!s.is_string()) throw Error(Errc::InvalidArgument, "templates: " + ptr + "/" + key + " holds a non-string");
        out.push_back(s.get<std::string>());
    }
    return out;
}

}  // namespace

std::string_view to_string(SampleKind kind) noexcept {
    switch (kind) {
        case SampleKind::Ground2D: return "GROUND_2D";
        case SampleKind::Ground3D: return "GROUND_3D";
        case SampleKind::ASL: return "ASL";
        case SampleKind::GML: return "GML";
        case SampleKind::SQA: return "SQA";
    }
    return "GROUND_2D";
}

std::string_view to_string(SqaTask task) noexcept {
    switch (task) {
        case SqaTask::Depth: return "depth";
        case SqaTask::Distance: return "distance";
        case SqaTask::Length: return "length";
        case SqaTask::Width: return "width";
        case SqaTask::Height: return "height";
    }
    return "depth";
}

std::optional<SqaTask> parse_sqa_task(std::string_view text) noexcept {
    for (auto t : kSqaTasks) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

nlohmann::ordered_json InstructionSample::to_json() const {
    nlohmann::ordered_json j;
    j["image"] = image ? nlohmann::ordered_json(*image) : nlohmann::ordered_json(nullptr);
    j["query"] = query;
    j["aux"] = aux ? nlohmann::ordered_json(*aux) : nlohmann::ordered_json(nullptr);
    j["target"] = target;
    j["kind"] = std::string(to_string(kind));
    j["task"] = task ? nlohmann::ordered_json(std::string(to_string(*task))) : nlohmann::ordered_json(nullptr);
    return j;
}

void TemplateSet::validate() const {
    for (auto fmt : {LocationFormat::HBB, LocationFormat::OBB, LocationFormat::Box3D}) {
        auto it = grounding.find(fmt);
        if (it == grounding.end() || it->second.size() != kPerFormat) {
            throw Error(Errc::InvalidArgument, "templates: each grounding format needs exactly 5 templates");
        }
    }
    for (auto t : kSqaTasks) {
        auto it = sqa.find(t);
        if (it == sqa.end() || it->second.empty()) {
            throw Error(Errc::InvalidArgument,
                        "templates: missing SQA templates for " + std::string(to_string(t)));
        }
    }
    if (asl.size() != kPerFormat || gml.size() != kPerFormat) {
        throw Error(Errc::InvalidArgument, "templates: asl and gml need exactly 5 templates");
    }
}

TemplateSet parse_templates(const json& doc) {
    if (!doc.is_object()) throw Error(Errc::InvalidArgument, "templates: root must be an object");
    TemplateSet set;
    set.version = doc.value("version", std::string("unversioned"));
    const auto g = doc.find("grounding");
    if (g == doc.end() || !g->is_object()) throw Error(Errc::InvalidArgument, "templates: missing /grounding");
    set.grounding[LocationFormat::HBB] = string_list(*g, "hbb", "/grounding");
    set.grounding[LocationFormat::OBB] = string_list(*g, "obb", "/grounding");
    set.grounding[LocationFormat::Box3D] = string_list(*g, "3dbb", "/grounding");
    const auto s = doc.find("sqa");
    if (s == doc.end() || !s->is_object()) throw Error(Errc::InvalidArgument, "templates: missing /sqa");
    for (auto t : kSqaTasks) set.sqa[t] = string_list(*s, std::string(to_string(t)), "/sqa");
    set.asl = string_list(doc, "asl", "");
    set.gml = string_list(doc, "gml", "");
    set.validate();
    return set;
}

TemplateSet load_templates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    try {
        return parse_templates(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidArgument, std::string("templates: invalid JSON: ") + e.what());
    }
}

void BuildResult::append(BuildResult&& other) {
    samples.insert(samples.end(), std::make_move_iterator(other.samples.begin()),
                   std::make_move_iterator(other.samples.end()));
    skipped_objects += other.skipped_objects;
}

struct InstructionBuilder::ObjectGeometry {
    geometry::CameraPoint ground;
    geometry::Box3D box;
    std::string ref;
};

InstructionBuilder::InstructionBuilder(TemplateSet templates, BuildOptions options)
    : templates_(std::move(templates)), options_(options) {
    templates_.validate();
    if (!(options_.inflation > 0.0)) throw Error(Errc::InvalidArgument, "inflation ratio must be positive");
}

std::vector<std::optional<InstructionBuilder::ObjectGeometry>> InstructionBuilder::derive_all(
    const eval::AnnotationFile& record, std::size_t& skipped) const {
    std::vector<std::optional<ObjectGeometry>> out(record.objects.size());
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < record.objects.size(); ++i) {
        const auto& obj = record.objects[i];
        try {
            ObjectGeometry g;
            g.ground = geometry::backproject_to_ground({obj.obb.cx, obj.obb.cy}, record.camera);
            g.box = geometry::derive_box3d(obj.obb, obj.dims_m(), record.camera, options_.inflation);
            out[i] = std::move(g);
            ok.push_back(i);
        } catch (const Error& e) {
            if (e.code() != Errc::RayMissesGround && e.code() != Errc::DegenerateYaw) throw;
            ++skipped;
        }
    }

    // Referring expression: appearance words plus the rank by distance.
    std::vector<std::size_t> by_distance = ok;
    std::stable_sort(by_distance.begin(), by_distance.end(), [&](std::size_t a, std::size_t b) {
        return geometry::spatial_measures(out[a]->ground).distance <
               geometry::spatial_measures(out[b]->ground).distance;
    });
    for (std::size_t rank = 0; rank < by_distance.size(); ++rank) {
        const auto& obj = record.objects[by_distance[rank]];
        std::string noun = obj.attribute("type").value_or("vehicle");
        if (auto color = obj.attribute("color")) noun = *color + " " + noun;
        out[by_distance[rank]]->ref =
            fmt::format("the {} that is the {}closest to the camera", noun, ordinal(rank + 1));
    }
    return out;
}

BuildResult InstructionBuilder::grounding(const eval::AnnotationFile& record) const {
    BuildResult result;
    const auto geo = derive_all(record, result.skipped_objects);
    const PixelFrame frame{record.camera.image_width, record.camera.image_height, options_.coords};
    for (std::size_t i = 0; i < record.objects.size(); ++i) {
        if (!geo[i]) continue;
        const auto& obj = record.objects[i];
        for (auto fmt : {LocationFormat::HBB, LocationFormat::OBB, LocationFormat::Box3D}) {
            std::string target;
            switch (fmt) {
                case LocationFormat::HBB: target = serialize(to_frame(geometry::obb_to_hbb(obj.obb), frame)); break;
                case LocationFormat::OBB: target = serialize(to_frame(obj.obb, frame)); break;
                case LocationFormat::Box3D: target = serialize(geo[i]->box); break;
            }
            for (const auto& tmpl : templates_.grounding.at(fmt)) {
                InstructionSample s;
                s.image = record.image;
                s.query = fill(tmpl, {{"ref", geo[i]->ref}});
                s.target = target;
                s.kind = fmt == LocationFormat::Box3D ? SampleKind::Ground3D : SampleKind::Ground2D;
                result.samples.push_back(std::move(s));
            }
        }
    }
    return result;
}

BuildResult InstructionBuilder::sqa(const eval::AnnotationFile& record) const {
    BuildResult result;
    const auto geo = derive_all(record, result.skipped_objects);
    for (std::size_t i = 0; i < record.objects.size(); ++i) {
        if (!geo[i]) continue;
        const auto truth = eval::sqa_ground_truth(record.objects[i], record.camera);
        for (auto task : kSqaTasks) {
            const auto& pool = templates_.sqa.at(task);
            InstructionSample s;
            s.image = record.image;
            s.query = fill(pool[i % pool.size()], {{"ref", geo[i]->ref}});
            s.target = format_measure(truth.at(task));
            s.kind = SampleKind::SQA;
            s.task = task;
            result.samples.push_back(std::move(s));
        }
    }
    return result;
}

BuildResult InstructionBuilder::phase2(const eval::AnnotationFile& record) const {
    BuildResult result;
    const auto geo = derive_all(record, result.skipped_objects);
    const PixelFrame frame{record.camera.image_width, record.camera.image_height, options_.coords};
    const auto& tmpl_2d = templates_.grounding.at(options_.aux_format == LocationFormat::OBB ? LocationFormat::OBB
                                                                                             : LocationFormat::HBB);
    const auto& tmpl_3d = templates_.grounding.at(LocationFormat::Box3D);
    for (std::size_t i = 0; i < record.objects.size(); ++i) {
        if (!geo[i]) continue;
        const auto& obj = record.objects[i];
        const std::string loc2d = options_.aux_format == LocationFormat::OBB
                                      ? serialize(to_frame(obj.obb, frame))
                                      : serialize(to_frame(geometry::obb_to_hbb(obj.obb), frame));
        const std::string loc3d = serialize(geo[i]->box);
        const std::string& ref = geo[i]->ref;
        for (std::size_t t = 0; t < TemplateSet::kPerFormat; ++t) {
            result.samples.push_back({record.image, fill(tmpl_2d[t], {{"ref", ref}}), std::nullopt, loc2d,
                                      SampleKind::Ground2D, std::nullopt});
            result.samples.push_back({record.image, fill(tmpl_3d[t], {{"ref", ref}}), std::nullopt, loc3d,
                                      SampleKind::Ground3D, std::nullopt});
            result.samples.push_back({record.image, fill(templates_.asl[t], {{"ref", ref}, {"aux", loc2d}}), loc2d,
                                      loc3d, SampleKind::ASL, std::nullopt});
            result.samples.push_back({std::nullopt, fill(templates_.gml[t], {{"ref", ref}, {"loc3d", loc3d}}),
                                      std::nullopt, loc2d, SampleKind::GML, std::nullopt});
        }
    }
    return result;
}

std::string format_measure(double meters) {
    std::string s = fmt::format("{:.2f}", meters);
    if (s == "-0.00") s = "0.00";
    return s + " m";
}

std::optional<std::string> check_sample(const InstructionSample& s) {
    if (s.query.empty()) return "empty query";
    switch (s.kind) {
        case SampleKind::GML:
            if (s.image) return "GML sample carries an image";
            if (s.aux) return "GML sample carries an aux location";
            break;
        case SampleKind::ASL:
            if (!s.image) return "ASL sample lacks an image";
            if (!s.aux) return "ASL sample lacks an aux location";
            break;
        default:
            if (!s.image) return "sample lacks an image";
            if (s.aux) return "unexpected aux location";
    }
    if (s.kind == SampleKind::SQA) {
        if (!s.task) return "SQA sample without task";
        if (!eval::extract_numeric(s.target)) return "SQA target is not numeric";
        return std::nullopt;
    }
    if (s.task) return "task set on a non-SQA sample";
    Location target;
    try {
        target = parse_location(s.target);
        if (s.aux) (void)parse_location(*s.aux);
    } catch (const ParseError& e) {
        return std::string("target does not re-parse: ") + e.what();
    }
    const bool is3d = std::holds_alternative<geometry::Box3D>(target);
    const bool want3d = s.kind == SampleKind::Ground3D || s.kind == SampleKind::ASL;
    if (is3d != want3d) return "target dimensionality does not match the sample kind";
    return std::nullopt;
}

void write_jsonl(std::ostream& out, const std::vector<InstructionSample>& samples) {
    for (const auto& s : samples) out << s.to_json().dump() << '\n';
}

}  // namespace skyground::instructions
