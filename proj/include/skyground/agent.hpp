// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skyground/annotation.hpp"
#include "skyground/vehicle_table.hpp"

namespace skyground::agent {

using Json = nlohmann::ordered_json;

enum class ToolKind { SpatialUnderstanding, ImageUnderstanding, QueryTable, WebSearch };

std::string_view to_string(ToolKind tool) noexcept;
std::optional<ToolKind> parse_tool(std::string_view name) noexcept;

// One plan step. String argument values of the form "$name" refer to the
// output bound by an earlier step.
struct ToolCall {
    ToolKind tool = ToolKind::ImageUnderstanding;
    Json args = Json::object();
    std::string output_name;
};

/// Ordered tool calls followed by an implicit summarize step. `summary`
/// carries the arguments of that terminal step (workflow, requested
/// attributes, target name).
struct Plan {
    std::vector<ToolCall> steps;
    Json summary = Json::object();

    /// Rejects empty plans and duplicate output names; throws
    /// Error(BindingMissing) on references to names not bound earlier.
    void validate() const;

    // Wire format: [{tool, args, output_name}, ..., {tool: "summarize", args}]
    Json to_json() const;
    static Plan from_json(const nlohmann::json& doc);  // throws Error(PlanParseError)
};

// "$name" -> "name"; nullopt for literal values.
std::optional<std::string> binding_reference(const Json& value);

/// Extracts a plan from LLM text: the first fenced block (```json ... ```),
/// or the whole reply when it is bare JSON. Throws Error(PlanParseError).
Plan parse_plan_text(std::string_view text);

enum class Capability { Planner, Vlm, Summarizer, Search };

/// Text-in, text-out model endpoint. Implementations that cannot take
/// concurrent calls return true from single_flight(); invoke_backend()
/// then serializes them.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::string name() const = 0;
    virtual std::set<Capability> capabilities() const = 0;
    virtual std::string invoke(const std::string& prompt, const std::optional<std::string>& image) = 0;
    virtual bool single_flight() const { return false; }

    std::mutex& flight_mutex() { return flight_mutex_; }

private:
    std::mutex flight_mutex_;
};

std::string invoke_backend(Backend& backend, const std::string& prompt,
                           const std::optional<std::string>& image);

struct MockNoise {
    double dims_sigma_mm = 0.0;
    double position_sigma_m = 0.0;
};

/// Annotation-backed stand-in for the spatially-aware VLM. It answers the
/// prompt formats emitted by the spatial- and image-understanding tools
/// from ground truth, optionally perturbed by seeded Gaussian noise.
class MockVlm final : public Backend {
public:
    MockVlm(eval::AnnotationFile annotations, std::uint64_t seed = 0, MockNoise noise = {},
            double inflation = 1.0);

    std::string name() const override { return "mock-vlm"; }
    std::set<Capability> capabilities() const override { return {Capability::Vlm}; }
    std::string invoke(const std::string& prompt, const std::optional<std::string>& image) override;
    // noisy answers draw from a shared generator
    bool single_flight() const override { return true; }

private:
    const eval::AnnotatedObject* object_at(std::string_view prompt) const;

    eval::AnnotationFile annotations_;
    std::mt19937_64 rng_;
    MockNoise noise_;
    double inflation_;
};

// Search backend answering from a JSON fixture {"<brand> <model>": {"price": ...}}.
class FixtureSearch final : public Backend {
public:
    explicit FixtureSearch(nlohmann::json fixture);
    static FixtureSearch load(const std::filesystem::path& path);

    std::string name() const override { return "fixture-search"; }
    std::set<Capability> capabilities() const override { return {Capability::Search}; }
    std::string invoke(const std::string& prompt, const std::optional<std::string>& image) override;

private:
    nlohmann::json fixture_;
};

struct HttpOptions {
    std::chrono::milliseconds timeout{30000};
    int retries = 1;
    bool embed_image = false;  // base64 file contents instead of a path token
};

/// Generic HTTP model endpoint: POST {"prompt", "image"} as JSON, answer is
/// the response body.
class HttpBackend final : public Backend {
public:
    HttpBackend(std::string url, std::set<Capability> caps, HttpOptions options = {});

    std::string name() const override { return "http:" + url_; }
    std::set<Capability> capabilities() const override { return caps_; }
    std::string invoke(const std::string& prompt, const std::optional<std::string>& image) override;

private:
    std::string url_;
    std::set<Capability> caps_;
    HttpOptions options_;
};

// Search over HTTP GET <url>?q=<query>; the body is the answer.
class HttpSearch final : public Backend {
public:
    explicit HttpSearch(std::string url, HttpOptions options = {});

    std::string name() const override { return "http-search:" + url_; }
    std::set<Capability> capabilities() const override { return {Capability::Search}; }
    std::string invoke(const std::string& prompt, const std::optional<std::string>& image) override;

private:
    std::string url_;
    HttpOptions options_;
};

// Append-only audit log of one query: planner exchange, every tool call
// with its backend prompts, and the summary.
class Trace {
public:
    void add(Json event) { events_.push_back(std::move(event)); }
    const Json& events() const noexcept { return events_; }
    std::string dump() const { return events_.dump(2); }

private:
    Json events_ = Json::array();
};

// Backend exchanges made while one tool runs.
struct CallLog {
    Json exchanges = Json::array();

    std::string call(Backend& backend, const std::string& prompt, const std::optional<std::string>& image);
};

struct ToolContext {
    std::optional<std::string> image;
};

class Tool {
public:
    virtual ~Tool() = default;
    virtual ToolKind kind() const = 0;
    // Throws Error on failure; the executor records it against the step.
    virtual Json run(const Json& args, const ToolContext& ctx, CallLog& log) = 0;
};

/// spatial_understanding. args {task: "dimensions", location} returns
/// {length_mm, width_mm, height_mm}; args {task: "locate", dims: record}
/// returns {box3d}.
class SpatialUnderstandingTool final : public Tool {
public:
    explicit SpatialUnderstandingTool(Backend& vlm) : vlm_(vlm) {}
    ToolKind kind() const override { return ToolKind::SpatialUnderstanding; }
    Json run(const Json& args, const ToolContext& ctx, CallLog& log) override;

private:
    Backend& vlm_;
};

// image_understanding. args {attribute, location} returns {attribute, value}.
class ImageUnderstandingTool final : public Tool {
public:
    explicit ImageUnderstandingTool(Backend& vlm) : vlm_(vlm) {}
    ToolKind kind() const override { return ToolKind::ImageUnderstanding; }
    Json run(const Json& args, const ToolContext& ctx, CallLog& log) override;

private:
    Backend& vlm_;
};

/// query_table. args {op: "match", dims} returns the nearest record;
/// args {op: "lookup", name} returns the named record.
class QueryTableTool final : public Tool {
public:
    explicit QueryTableTool(const vehicles::VehicleTable& table) : table_(table) {}
    ToolKind kind() const override { return ToolKind::QueryTable; }
    Json run(const Json& args, const ToolContext& ctx, CallLog& log) override;

private:
    const vehicles::VehicleTable& table_;
};

// web_search. args {vehicle: record} returns {price, source}. Without a
// configured backend every call fails with ToolError.
class WebSearchTool final : public Tool {
public:
    explicit WebSearchTool(Backend* search) : search_(search) {}
    ToolKind kind() const override { return ToolKind::WebSearch; }
    Json run(const Json& args, const ToolContext& ctx, CallLog& log) override;

private:
    Backend* search_;
};

Json record_to_json(const vehicles::VehicleRecord& r);

class Toolbox {
public:
    void add(std::unique_ptr<Tool> tool);
    Tool* find(ToolKind kind) const noexcept;

private:
    std::map<ToolKind, std::unique_ptr<Tool>> tools_;
};

struct StepResult {
    std::size_t step = 0;
    ToolKind tool = ToolKind::ImageUnderstanding;
    std::string output_name;
    std::optional<std::string> error;  // tool failure or halted dependency
    bool skipped = false;
};

struct Execution {
    std::map<std::string, Json> outputs;
    std::vector<StepResult> steps;

    bool ok() const noexcept;
};

/// Runs the plan step by step, binding each output under its name. A
/// failing step is recorded and halts every later step that references
/// its output. Throws Error(BindingMissing) or ToolError (unregistered
/// tool) before any tool runs.
Execution execute(const Plan& plan, const Toolbox& toolbox, const ToolContext& ctx, Trace& trace);

class Planner {
public:
    virtual ~Planner() = default;
    virtual Plan make_plan(const std::string& query, const std::optional<std::string>& image, Trace& trace) = 0;
};

/// Deterministic keyword classifier over the three workflows: attribute
/// recognition, zero-shot attribute recognition and target retrieval.
/// Throws Error(UnknownWorkflow).
class KeywordPlanner final : public Planner {
public:
    Plan make_plan(const std::string& query, const std::optional<std::string>& image, Trace& trace) override;
};

/// Few-shot prompted LLM planner. A malformed reply is re-prompted once;
/// the second failure raises Error(PlanParseError).
class LlmPlanner final : public Planner {
public:
    LlmPlanner(Backend& backend, std::string prompt_template);
    Plan make_plan(const std::string& query, const std::optional<std::string>& image, Trace& trace) override;

private:
    Backend& backend_;
    std::string prompt_template_;
};

std::string load_text(const std::filesystem::path& path);

class Summarizer {
public:
    virtual ~Summarizer() = default;
    virtual std::string summarize(const std::string& query, const Plan& plan, const Execution& exec,
                                  Trace& trace) = 0;
};

/// Renders "attribute: value" pairs, or "location: <box3d>" for retrieval.
/// A web price that could not be fetched falls back to the table price.
class TemplateSummarizer final : public Summarizer {
public:
    std::string summarize(const std::string& query, const Plan& plan, const Execution& exec,
                          Trace& trace) override;
};

class LlmSummarizer final : public Summarizer {
public:
    explicit LlmSummarizer(Backend& backend) : backend_(backend) {}
    std::string summarize(const std::string& query, const Plan& plan, const Execution& exec,
                          Trace& trace) override;

private:
    Backend& backend_;
};

struct QueryResult {
    std::string answer;
    bool ok = false;
    Trace trace;
};

/// Plan, execute and summarize one query. Planning failures and failed
/// steps whose outputs the answer needs become an "error: ..." answer
/// rather than an exception.
class Agent {
public:
    Agent(Planner& planner, const Toolbox& toolbox, Summarizer& summarizer)
        : planner_(planner), toolbox_(toolbox), summarizer_(summarizer) {}

    QueryResult run_query(const std::optional<std::string>& image, const std::string& query);

private:
    Planner& planner_;
    const Toolbox& toolbox_;
    Summarizer& summarizer_;
};

}  // namespace skyground::agent
