// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skyground/annotation.hpp"
#include "skyground/location_format.hpp"

namespace skyground::instructions {

enum class SampleKind { Ground2D, Ground3D, ASL, GML, SQA };
enum class SqaTask { Depth, Distance, Length, Width, Height };
enum class LocationFormat { HBB, OBB, Box3D };

inline constexpr std::array<SqaTask, 5> kSqaTasks = {SqaTask::Depth, SqaTask::Distance, SqaTask::Length,
                                                     SqaTask::Width, SqaTask::Height};

std::string_view to_string(SampleKind kind) noexcept;
std::string_view to_string(SqaTask task) noexcept;
std::optional<SqaTask> parse_sqa_task(std::string_view text) noexcept;

struct InstructionSample {
    std::optional<std::string> image;  // absent for GML samples
    std::string query;
    std::optional<std::string> aux;    // 2D location given as input (ASL only)
    std::string target;
    SampleKind kind = SampleKind::Ground2D;
    std::optional<SqaTask> task;       // SQA only

    nlohmann::ordered_json to_json() const;
};

/// Query templates loaded from a versioned JSON file. Placeholders:
/// {ref} referring expression, {aux} auxiliary 2D location, {loc3d}
/// serialized Box3D.
struct TemplateSet {
    static constexpr std::size_t kPerFormat = 5;

    std::string version;
    std::map<LocationFormat, std::vector<std::string>> grounding;
    std::map<SqaTask, std::vector<std::string>> sqa;
    std::vector<std::string> asl;
    std::vector<std::string> gml;

    // Throws Error(InvalidArgument) when any list has the wrong size.
    void validate() const;
};

TemplateSet parse_templates(const nlohmann::json& doc);
TemplateSet load_templates(const std::filesystem::path& path);

struct BuildOptions {
    LocationFormat aux_format = LocationFormat::HBB;  // 2D format for phase-2 samples
    CoordMode coords = CoordMode::Absolute;
    double inflation = 1.0;
};

struct BuildResult {
    std::vector<InstructionSample> samples;
    std::size_t skipped_objects = 0;  // objects whose geometry could not be derived

    void append(BuildResult&& other);
};

class InstructionBuilder {
public:
    InstructionBuilder(TemplateSet templates, BuildOptions options = {});

    // 3 formats x 5 templates per object.
    BuildResult grounding(const eval::AnnotationFile& record) const;
    // One sample per SQA task per object.
    BuildResult sqa(const eval::AnnotationFile& record) const;
    // Per template: GROUND_2D, GROUND_3D, ASL and GML samples per object.
    BuildResult phase2(const eval::AnnotationFile& record) const;

    const TemplateSet& templates() const noexcept { return templates_; }
    const BuildOptions& options() const noexcept { return options_; }

private:
    struct ObjectGeometry;
    std::vector<std::optional<ObjectGeometry>> derive_all(const eval::AnnotationFile& record,
                                                          std::size_t& skipped) const;

    TemplateSet templates_;
    BuildOptions options_;
};

// Numeric SQA answer with unit, e.g. "50.00 m".
std::string format_measure(double meters);

/// Checks the structural invariants of one sample (GML has no image and
/// no aux, ASL carries aux and a 3D target, SQA targets are numeric) and
/// that its target re-parses. Returns a description of the first violation.
std::optional<std::string> check_sample(const InstructionSample& sample);

void write_jsonl(std::ostream& out, const std::vector<InstructionSample>& samples);

}  // namespace skyground::instructions
