// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "skyground/agent.hpp"
#include "skyground/error.hpp"

namespace skyground::agent {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void collect_references(const Json& value, std::vector<std::string>& out) {
    if (auto ref = binding_reference(value)) {
        out.push_back(*ref);
    } else if (value.is_structured()) {
        for (const auto& v : value) collect_references(v, out);
    }
}

struct AttributeKeyword {
    const char* pattern;
    std::vector<const char*> attributes;
};

// Keyword -> requested attribute(s); order of appearance in the query sets
// the order of the answer.
const std::vector<AttributeKeyword>& attribute_keywords() {
    static const std::vector<AttributeKeyword> kKeywords = {
        {R"(\b(what|which) (car|vehicle) is\b)", {"brand", "model"}},
        {R"(\b(brand|make|manufacturer)\b)", {"brand"}},
        {R"(\bmodel\b)", {"model"}},
        {R"(\b(price|cost|how much)\b)", {"price"}},
        {R"(\b(powertrain|electric|fuel|engine)\b)", {"powertrain"}},
        {R"(\bdoors?\b)", {"doors"}},
        {R"(\bseats?\b)", {"seats"}},
        {R"(\bcolou?r\b)", {"color"}},
        {R"(\b(type|category|kind)\b)", {"type"}},
    };
    return kKeywords;
}

bool is_table_attribute(const std::string& a) {
    return a == "brand" || a == "model" || a == "price" || a == "powertrain" || a == "doors" || a == "seats";
}

}  // namespace

std::string_view to_string(ToolKind tool) noexcept {
    switch (tool) {
        case ToolKind::SpatialUnderstanding: return "spatial_understanding";
        case ToolKind::ImageUnderstanding: return "image_understanding";
        case ToolKind::QueryTable: return "query_table";
        case ToolKind::WebSearch: return "web_search";
    }
    return "image_understanding";
}

std::optional<ToolKind> parse_tool(std::string_view name) noexcept {
    for (auto t : {ToolKind::SpatialUnderstanding, ToolKind::ImageUnderstanding, ToolKind::QueryTable,
                   ToolKind::WebSearch}) {
        if (to_string(t) == name) return t;
    }
    return std::nullopt;
}

std::optional<std::string> binding_reference(const Json& value) {
    if (!value.is_string()) return std::nullopt;
    const auto& s = value.get_ref<const std::string&>();
    if (s.size() < 2 || s[0] != '$') return std::nullopt;
    return s.substr(1, s.find('.') == std::string::npos ? std::string::npos : s.find('.') - 1);
}

void Plan::validate() const {
    if (steps.empty()) throw Error(Errc::InvalidArgument, "plan has no tool calls");
    std::set<std::string> bound;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& step = steps[i];
        std::vector<std::string> refs;
        collect_references(step.args, refs);
        for (const auto& r : refs) {
            if (!bound.count(r)) {
                throw Error(Errc::BindingMissing,
                            "step " + std::to_string(i) + " references '$" + r + "' before it is bound");
            }
        }
        if (step.output_name.empty()) {
            throw Error(Errc::InvalidArgument, "step " + std::to_string(i) + " has no output name");
        }
        if (!bound.insert(step.output_name).second) {
            throw Error(Errc::InvalidArgument, "output name '" + step.output_name + "' is bound twice");
        }
    }
    std::vector<std::string> refs;
    collect_references(summary, refs);
    for (const auto& r : refs) {
        if (!bound.count(r)) throw Error(Errc::BindingMissing, "summary references unbound '$" + r + "'");
    }
}

Json Plan::to_json() const {
    Json arr = Json::array();
    for (const auto& s : steps) {
        arr.push_back({{"tool", std::string(to_string(s.tool))}, {"args", s.args}, {"output_name", s.output_name}});
    }
    arr.push_back({{"tool", "summarize"}, {"args", summary}});
    return arr;
}

Plan Plan::from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) throw Error(Errc::PlanParseError, "plan must be a JSON array");
    Plan plan;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        const std::string where = "plan item " + std::to_string(i);
        if (!item.is_object()) throw Error(Errc::PlanParseError, where + " is not an object");
        auto tool = item.find("tool");
        if (tool == item.end() || !tool->is_string()) throw Error(Errc::PlanParseError, where + " lacks a tool name");
        Json args = Json::object();
        if (auto a = item.find("args"); a != item.end()) {
            if (!a->is_object()) throw Error(Errc::PlanParseError, where + ": args must be an object");
            args = Json(*a);
        }
        const auto name = tool->get<std::string>();
        if (name == "summarize") {
            if (i + 1 != doc.size()) throw Error(Errc::PlanParseError, "summarize must be the last step");
            plan.summary = std::move(args);
            continue;
        }
        const auto kind = parse_tool(name);
        if (!kind) throw Error(Errc::PlanParseError, where + ": unknown tool '" + name + "'");
        auto out = item.find("output_name");
        if (out == item.end() || !out->is_string()) throw Error(Errc::PlanParseError, where + " lacks output_name");
        plan.steps.push_back({*kind, std::move(args), out->get<std::string>()});
    }
    return plan;
}

Plan parse_plan_text(std::string_view text) {
    static const std::regex kFence(R"(```(?:json|JSON)?[ \t]*\r?\n?([\s\S]*?)```)");
    const std::string s(text);
    std::smatch m;
    std::string body = std::regex_search(s, m, kFence) ? m.str(1) : s;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::PlanParseError, std::string("reply is not valid JSON: ") + e.what());
    }
    return Plan::from_json(doc);
}

Plan KeywordPlanner::make_plan(const std::string& query, const std::optional<std::string>& image, Trace& trace) {
    static const std::regex kLocation(R"(\[[^\[\]]*\])");
    static const std::regex kRetrieval(
        R"(^\s*(?:please\s+)?(?:find|locate|search for|where is|show me)\s+(?:the\s+)?(.+?)(?:\s+in\s+(?:the|this)\s+(?:scene|image|picture))?\s*[?.!]*\s*$)");

    if (query.empty()) throw Error(Errc::InvalidArgument, "empty query");
    const std::string l = lower(query);
    std::smatch loc_match;
    const bool has_location = std::regex_search(query, loc_match, kLocation);

    Plan plan;
    std::smatch m;
    if (!has_location && std::regex_match(l, m, kRetrieval)) {
        // same offsets in the original-case query
        const std::string name = query.substr(static_cast<std::size_t>(m.position(1)),
                                              static_cast<std::size_t>(m.length(1)));
        plan.steps.push_back({ToolKind::QueryTable, {{"op", "lookup"}, {"name", name}}, "target"});
        plan.steps.push_back({ToolKind::SpatialUnderstanding, {{"task", "locate"}, {"dims", "$target"}}, "location"});
        plan.summary = {{"workflow", "target_retrieval"}, {"target", name}};
    } else {
        std::vector<std::pair<std::ptrdiff_t, std::string>> found;
        for (const auto& kw : attribute_keywords()) {
            std::smatch km;
            if (std::regex_search(l, km, std::regex(kw.pattern))) {
                for (const auto* a : kw.attributes) found.emplace_back(km.position(0), a);
            }
        }
        std::stable_sort(found.begin(), found.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::string> attrs;
        for (const auto& [pos, a] : found) {
            if (std::find(attrs.begin(), attrs.end(), a) == attrs.end()) attrs.push_back(a);
        }
        if (attrs.empty()) throw Error(Errc::UnknownWorkflow, "no workflow matches the query '" + query + "'");
        if (!has_location) throw Error(Errc::UnknownWorkflow, "attribute queries need a vehicle location");
        const std::string location = loc_match.str();

        const bool zero_shot = std::any_of(attrs.begin(), attrs.end(), is_table_attribute);
        if (zero_shot) {
            plan.steps.push_back(
                {ToolKind::SpatialUnderstanding, {{"task", "dimensions"}, {"location", location}}, "dims"});
            plan.steps.push_back({ToolKind::QueryTable, {{"op", "match"}, {"dims", "$dims"}}, "vehicle"});
            if (std::find(attrs.begin(), attrs.end(), "price") != attrs.end()) {
                plan.steps.push_back({ToolKind::WebSearch, {{"vehicle", "$vehicle"}}, "price"});
            }
        }
        for (const auto& a : attrs) {
            if (is_table_attribute(a)) continue;
            plan.steps.push_back({ToolKind::ImageUnderstanding, {{"attribute", a}, {"location", location}}, a});
        }
        plan.summary = {{"workflow", zero_shot ? "zero_shot_attribute_recognition" : "attribute_recognition"},
                        {"attributes", attrs}};
    }
    trace.add({{"event", "plan"}, {"planner", "keyword"}, {"plan", plan.to_json()}});
    (void)image;
    return plan;
}

LlmPlanner::LlmPlanner(Backend& backend, std::string prompt_template)
    : backend_(backend), prompt_template_(std::move(prompt_template)) {
    if (prompt_template_.find("{query}") == std::string::npos) {
        throw Error(Errc::InvalidArgument, "planner prompt template lacks a {query} placeholder");
    }
}

Plan LlmPlanner::make_plan(const std::string& query, const std::optional<std::string>& image, Trace& trace) {
    if (query.empty()) throw Error(Errc::InvalidArgument, "empty query");
    std::string prompt = prompt_template_;
    prompt.replace(prompt.find("{query}"), 7, query);

    Json attempts = Json::array();
    for (int attempt = 0; attempt < 2; ++attempt) {
        const std::string reply = invoke_backend(backend_, prompt, image);
        Json record = {{"prompt", prompt}, {"response", reply}};
        try {
            Plan plan = parse_plan_text(reply);
            attempts.push_back(std::move(record));
            trace.add({{"event", "plan"}, {"planner", backend_.name()}, {"attempts", attempts}, {"plan", plan.to_json()}});
            return plan;
        } catch (const Error& e) {
            if (e.code() != Errc::PlanParseError) throw;
            record["error"] = e.what();
            attempts.push_back(std::move(record));
            if (attempt == 1) {
                trace.add({{"event", "plan"}, {"planner", backend_.name()}, {"attempts", attempts}});
                throw;
            }
            prompt += "\n\nYour previous reply could not be parsed (" + std::string(e.what()) +
                      "). Reply with only a fenced JSON array of {tool, args, output_name} objects.";
        }
    }
    throw Error(Errc::PlanParseError, "unreachable");
}

std::string load_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace skyground::agent
