// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <set>

#include "skyground/agent.hpp"
#include "skyground/annotation.hpp"
#include "skyground/error.hpp"

namespace skyground::agent {
namespace {

// Substitutes "$name" / "$name.field" references. Returns the first
// unavailable binding through `missing`.
Json resolve(const Json& value, const std::map<std::string, Json>& outputs, std::optional<std::string>& missing) {
    if (auto ref = binding_reference(value)) {
        auto it = outputs.find(*ref);
        if (it == outputs.end()) {
            if (!missing) missing = *ref;
            return nullptr;
        }
        const auto& s = value.get_ref<const std::string&>();
        const auto dot = s.find('.');
        if (dot == std::string::npos) return it->second;
        const std::string field = s.substr(dot + 1);
        if (!it->second.contains(field)) {
            if (!missing) missing = *ref + "." + field;
            return nullptr;
        }
        return it->second.at(field);
    }
    if (value.is_object()) {
        Json out = Json::object();
        for (const auto& [k, v] : value.items()) out[k] = resolve(v, outputs, missing);
        return out;
    }
    if (value.is_array()) {
        Json out = Json::array();
        for (const auto& v : value) out.push_back(resolve(v, outputs, missing));
        return out;
    }
    return value;
}

std::string render(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return eval::format_number(v.get<double>());
    return v.dump();
}

std::string failure_answer(const std::string& reason, const Execution* exec) {
    std::string answer = "error: " + reason;
    if (exec) {
        for (const auto& s : exec->steps) {
            if (s.error) answer += "; step " + std::to_string(s.step) + " " + std::string(to_string(s.tool)) + ": " + *s.error;
        }
    }
    return answer;
}

}  // namespace

bool Execution::ok() const noexcept {
    return std::none_of(steps.begin(), steps.end(), [](const StepResult& s) { return s.error.has_value(); });
}

Execution execute(const Plan& plan, const Toolbox& toolbox, const ToolContext& ctx, Trace& trace) {
    plan.validate();
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        if (!toolbox.find(plan.steps[i].tool)) {
            throw ToolError(i, "tool '" + std::string(to_string(plan.steps[i].tool)) + "' is not registered");
        }
    }

    Execution exec;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const ToolCall& call = plan.steps[i];
        StepResult result{i, call.tool, call.output_name, std::nullopt, false};

        std::optional<std::string> missing;
        const Json args = resolve(call.args, exec.outputs, missing);
        if (missing) {
            result.skipped = true;
            result.error = "halted: input '" + *missing + "' is unavailable";
            trace.add({{"event", "tool_skipped"},
                       {"step", i},
                       {"tool", std::string(to_string(call.tool))},
                       {"output_name", call.output_name},
                       {"reason", *result.error}});
            exec.steps.push_back(std::move(result));
            continue;
        }

        CallLog log;
        Json event = {{"event", "tool_call"},
                      {"step", i},
                      {"tool", std::string(to_string(call.tool))},
                      {"output_name", call.output_name},
                      {"args", args}};
        try {
            Json output = toolbox.find(call.tool)->run(args, ctx, log);
            event["exchanges"] = log.exchanges;
            event["output"] = output;
            exec.outputs[call.output_name] = std::move(output);
        } catch (const Error& e) {
            const ToolError wrapped(i, e.what());
            result.error = e.what();
            event["exchanges"] = log.exchanges;
            event["error"] = wrapped.what();
        }
        trace.add(std::move(event));
        exec.steps.push_back(std::move(result));
    }
    return exec;
}

std::string TemplateSummarizer::summarize(const std::string& query, const Plan& plan, const Execution& exec,
                                          Trace& trace) {
    auto output = [&](const std::string& name) -> const Json* {
        auto it = exec.outputs.find(name);
        return it == exec.outputs.end() ? nullptr : &it->second;
    };
    auto need = [&](const std::string& name) -> const Json& {
        const Json* j = output(name);
        if (!j) throw Error(Errc::NotFound, "output '" + name + "' is unavailable");
        return *j;
    };

    const std::string workflow = plan.summary.value("workflow", std::string());
    std::string answer;
    if (workflow == "target_retrieval") {
        answer = "location: " + need("location").at("box3d").get<std::string>();
    } else if (plan.summary.contains("attributes")) {
        for (const auto& a : plan.summary.at("attributes")) {
            const std::string attr = a.get<std::string>();
            std::string value;
            if (attr == "color" || attr == "type") {
                value = render(need(attr).at("value"));
            } else if (attr == "price") {
                if (const Json* web = output("price")) {
                    value = render(web->at("price"));
                } else {
                    value = render(need("vehicle").at("price")) + " (table)";
                }
            } else {
                value = render(need("vehicle").at(attr));
            }
            answer += (answer.empty() ? "" : "; ") + attr + ": " + value;
        }
    } else {
        for (const auto& [name, value] : exec.outputs) {
            answer += (answer.empty() ? "" : "; ") + name + ": " + render(value);
        }
    }
    trace.add({{"event", "summarize"}, {"summarizer", "template"}, {"query", query}, {"answer", answer}});
    return answer;
}

std::string LlmSummarizer::summarize(const std::string& query, const Plan& plan, const Execution& exec,
                                     Trace& trace) {
    Json outputs = Json::object();
    for (const auto& [name, value] : exec.outputs) outputs[name] = value;
    Json failures = Json::array();
    for (const auto& s : exec.steps) {
        if (s.error) failures.push_back({{"step", s.step}, {"output_name", s.output_name}, {"error", *s.error}});
    }
    const std::string prompt = "Answer the user's question about the aerial image using only the tool results.\n"
                               "Question: " + query + "\nPlan: " + plan.to_json().dump() +
                               "\nTool outputs: " + outputs.dump() + "\nFailed steps: " + failures.dump() +
                               "\nGive a concise final answer.";
    const std::string answer = invoke_backend(backend_, prompt, std::nullopt);
    trace.add({{"event", "summarize"}, {"summarizer", backend_.name()}, {"prompt", prompt}, {"answer", answer}});
    return answer;
}

QueryResult Agent::run_query(const std::optional<std::string>& image, const std::string& query) {
    QueryResult result;
    Trace& trace = result.trace;
    trace.add({{"event", "query"}, {"query", query}, {"image", image ? Json(*image) : Json(nullptr)}});

    auto fail = [&](const std::string& answer) {
        result.answer = answer;
        result.ok = false;
        trace.add({{"event", "answer"}, {"ok", false}, {"answer", answer}});
        return std::move(result);
    };

    Plan plan;
    try {
        plan = planner_.make_plan(query, image, trace);
        plan.validate();
    } catch (const Error& e) {
        return fail(failure_answer(e.what(), nullptr));
    }

    Execution exec;
    try {
        exec = execute(plan, toolbox_, ToolContext{image}, trace);
    } catch (const Error& e) {
        return fail(failure_answer(e.what(), nullptr));
    }
    if (exec.outputs.empty()) return fail(failure_answer("no tool produced an output", &exec));

    try {
        result.answer = summarizer_.summarize(query, plan, exec, trace);
    } catch (const Error& e) {
        return fail(failure_answer(e.what(), &exec));
    }
    result.ok = true;
    trace.add({{"event", "answer"}, {"ok", true}, {"answer", result.answer}});
    return result;
}

}  // namespace skyground::agent
