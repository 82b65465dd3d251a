// SPDX-License-Identifier: Apache-2.0
#include "skyground/eval_harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "skyground/error.hpp"
#include "skyground/location_format.hpp"

namespace skyground::eval {
namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw Error(Errc::LengthMismatch,
                    fmt::format("{} predictions for {} ground-truth items", a, b));
    }
}

bool contains_word(const std::string& lower, const std::regex& re) { return std::regex_search(lower, re); }

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<std::string> string_field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_array() && std::string_view(key) == "hbb") {
        std::string s = "[";
        for (std::size_t i = 0; i < it->size(); ++i) s += (i ? "," : "") + (*it)[i].dump();
        return s + "]";
    }
    return it->dump();
}

double ratio(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

std::map<std::string, const Prediction*> index_predictions(const std::vector<Prediction>& preds,
                                                           bool keyed_by_task) {
    std::map<std::string, const Prediction*> out;
    for (const auto& p : preds) {
        const std::string key = keyed_by_task ? p.id + "\x1f" + p.task.value_or("") : p.id;
        out.emplace(key, &p);  // first occurrence wins
    }
    return out;
}

std::optional<instructions::Location> prediction_location(const Prediction& p) {
    if (p.location) {
        try {
            return instructions::parse_location(*p.location);
        } catch (const ParseError&) {
            return std::nullopt;
        }
    }
    if (p.answer) return instructions::find_location(*p.answer);
    return std::nullopt;
}

}  // namespace

std::optional<double> extract_numeric(std::string_view answer) {
    static const std::regex kNumber(R"([-+]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|[-+]?\.\d+)");
    const std::string s(answer);
    std::smatch m;
    if (!std::regex_search(s, m, kNumber)) return std::nullopt;
    std::string token = m.str();
    const auto start = static_cast<std::size_t>(m.position());
    // "ID-5" is not a negative number
    if ((token[0] == '-' || token[0] == '+') && start > 0 &&
        std::isalnum(static_cast<unsigned char>(s[start - 1]))) {
        token.erase(0, 1);
    }
    token.erase(std::remove(token.begin(), token.end(), ','), token.end());
    try {
        return std::stod(token);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<double> extract_meters(std::string_view answer) {
    static const std::regex kMm(R"((^|[^a-z])(mm|millimet(er|re)s?)([^a-z]|$))");
    static const std::regex kCm(R"((^|[^a-z])(cm|centimet(er|re)s?)([^a-z]|$))");
    auto v = extract_numeric(answer);
    if (!v) return std::nullopt;
    const std::string l = lower(answer);
    if (contains_word(l, kMm)) return *v / 1000.0;
    if (contains_word(l, kCm)) return *v / 100.0;
    return v;
}

AccuracyScore eval_grounding(std::span<const std::optional<geometry::HorizontalBox2D>> preds,
                             std::span<const geometry::HorizontalBox2D> gts, double thresh) {
    require_same_length(preds.size(), gts.size());
    if (!(thresh > 0.0 && thresh < 1.0)) throw Error(Errc::InvalidArgument, "threshold must lie in (0, 1)");
    AccuracyScore score;
    score.n_evaluated = gts.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        if (!preds[i] || !preds[i]->valid()) {
            ++score.n_missing;
            continue;
        }
        if (geometry::hbb_iou(*preds[i], gts[i]) >= thresh) ++hits;
    }
    score.accuracy = ratio(hits, gts.size());
    return score;
}

AccuracyScore eval_retrieval(std::span<const std::optional<geometry::Box3D>> preds,
                             std::span<const geometry::Box3D> gts,
                             std::span<const geometry::CameraModel> cams) {
    require_same_length(preds.size(), gts.size());
    require_same_length(cams.size(), gts.size());
    AccuracyScore score;
    score.n_evaluated = gts.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        if (!preds[i]) {
            ++score.n_missing;
            continue;
        }
        if (geometry::bev_iou(*preds[i], gts[i], cams[i]) > kRetrievalThreshold) ++hits;
    }
    score.accuracy = ratio(hits, gts.size());
    return score;
}

bool within_tolerance(double pred, double gt, double rel) noexcept {
    return std::abs(pred - gt) <= rel * std::abs(gt);
}

RegressionMetrics eval_regression(std::span<const double> preds, std::span<const double> gts) {
    require_same_length(preds.size(), gts.size());
    if (gts.empty()) throw Error(Errc::InvalidArgument, "regression metrics need at least one pair");
    const double n = static_cast<double>(gts.size());
    double abs_sum = 0.0, sq_sum = 0.0, gt_sum = 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        const double d = preds[i] - gts[i];
        abs_sum += std::abs(d);
        sq_sum += d * d;
        gt_sum += gts[i];
        if (within_tolerance(preds[i], gts[i])) ++ok;
    }
    const double mean = gt_sum / n;
    double ss_tot = 0.0;
    for (double g : gts) ss_tot += (g - mean) * (g - mean);

    RegressionMetrics m;
    m.n = gts.size();
    m.mae = abs_sum / n;
    m.rmse = std::sqrt(sq_sum / n);
    if (ss_tot > 0.0) m.r_squared = 1.0 - sq_sum / ss_tot;
    m.acc_5pct = ratio(ok, gts.size());
    return m;
}

AttributeKind attribute_kind(std::string_view attribute) noexcept {
    const std::string a = lower(attribute);
    if (a == "price") return AttributeKind::Price;
    if (a == "doors" || a == "seats") return AttributeKind::Numeric;
    return AttributeKind::Categorical;
}

std::string normalize_text(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

bool attribute_correct(std::string_view pred, std::string_view gt, AttributeKind kind,
                       std::optional<double> price_tol) {
    if (kind == AttributeKind::Categorical) return normalize_text(pred) == normalize_text(gt);
    const auto p = extract_numeric(pred);
    const auto g = extract_numeric(gt);
    if (!p || !g) return false;
    if (kind == AttributeKind::Price && price_tol) return within_tolerance(*p, *g, *price_tol);
    return *p == *g;
}

AccuracyScore eval_attributes(std::span<const std::optional<std::string>> preds,
                              std::span<const std::string> gts, AttributeKind kind,
                              std::optional<double> price_tol) {
    require_same_length(preds.size(), gts.size());
    AccuracyScore score;
    score.n_evaluated = gts.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        if (!preds[i] || (kind != AttributeKind::Categorical && !extract_numeric(*preds[i]))) {
            ++score.n_missing;
            continue;
        }
        if (attribute_correct(*preds[i], gts[i], kind, price_tol)) ++hits;
    }
    score.accuracy = ratio(hits, gts.size());
    return score;
}

std::map<instructions::SqaTask, double> sqa_ground_truth(const AnnotatedObject& obj,
                                                         const geometry::CameraModel& cam) {
    using instructions::SqaTask;
    const auto ground = geometry::backproject_to_ground({obj.obb.cx, obj.obb.cy}, cam);
    const auto measures = geometry::spatial_measures(ground);
    const auto dims = obj.dims_m();
    return {{SqaTask::Depth, measures.depth},
            {SqaTask::Distance, measures.distance},
            {SqaTask::Length, dims.length},
            {SqaTask::Width, dims.width},
            {SqaTask::Height, dims.height}};
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["task"] = task;
    auto per = nlohmann::ordered_json::object();
    for (const auto& [name, m] : metrics) {
        nlohmann::ordered_json b;
        auto put = [&b](const char* key, const std::optional<double>& v) {
            b[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
        };
        put("acc_at_05", m.acc_at_05);
        put("acc_at_bev_025", m.acc_at_bev_025);
        put("mae", m.mae);
        put("rmse", m.rmse);
        put("r_squared", m.r_squared);
        put("acc_5pct", m.acc_5pct);
        put("accuracy", m.accuracy);
        b["n_evaluated"] = m.n_evaluated;
        b["n_parse_failures"] = m.n_parse_failures;
        b["unit"] = m.unit.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(m.unit);
        per[name] = std::move(b);
    }
    j["metrics"] = std::move(per);
    return j;
}

std::string EvalReport::to_table() const {
    auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string("-"); };
    std::ostringstream out;
    out << fmt::format("task: {}\n", task);
    out << fmt::format("{:<12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>6} {:>6} {:>5}\n", "subtask", "acc@0.5",
                       "acc@bev", "mae", "rmse", "r2", "acc@5%", "acc", "n", "fail", "unit");
    for (const auto& [name, m] : metrics) {
        out << fmt::format("{:<12} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>6} {:>6} {:>5}\n", name,
                           cell(m.acc_at_05), cell(m.acc_at_bev_025), cell(m.mae), cell(m.rmse),
                           cell(m.r_squared), cell(m.acc_5pct), cell(m.accuracy), m.n_evaluated,
                           m.n_parse_failures, m.unit.empty() ? "-" : m.unit);
    }
    return out.str();
}

std::vector<Prediction> parse_predictions(std::istream& in) {
    std::vector<Prediction> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(row, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ParseError(row, "prediction must be a JSON object");
        Prediction p;
        auto id = j.find("id");
        if (id == j.end()) throw ParseError(row, "prediction lacks an id");
        p.id = id->is_string() ? id->get<std::string>() : id->dump();
        p.task = string_field(j, "task");
        if (!p.task) p.task = string_field(j, "attribute");
        p.answer = string_field(j, "answer");
        p.location = string_field(j, "hbb");
        if (!p.location) p.location = string_field(j, "box3d");
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    return parse_predictions(in);
}

EvalReport evaluate_grounding(const std::vector<Prediction>& preds, const AnnotationFile& gt,
                              const EvalOptions& opts) {
    const auto index = index_predictions(preds, false);
    std::vector<std::optional<geometry::HorizontalBox2D>> p;
    std::vector<geometry::HorizontalBox2D> g;
    for (const auto& obj : gt.objects) {
        g.push_back(geometry::obb_to_hbb(obj.obb));
        std::optional<geometry::HorizontalBox2D> box;
        if (auto it = index.find(obj.id); it != index.end()) {
            if (auto loc = prediction_location(*it->second)) {
                if (auto* h = std::get_if<geometry::HorizontalBox2D>(&*loc)) {
                    box = *h;
                } else if (auto* o = std::get_if<geometry::OrientedBox2D>(&*loc)) {
                    box = geometry::obb_to_hbb(*o);
                } else {
                    try {
                        box = geometry::project_box3d(std::get<geometry::Box3D>(*loc), gt.camera).hbb;
                    } catch (const Error&) {
                    }
                }
            }
        }
        p.push_back(box);
    }
    const auto score = eval_grounding(p, g, opts.grounding_threshold);
    EvalReport report{"grounding", {}};
    MetricBundle& m = report.metrics["grounding"];
    m.acc_at_05 = score.accuracy;
    m.n_evaluated = score.n_evaluated;
    m.n_parse_failures = score.n_missing;
    return report;
}

EvalReport evaluate_sqa(const std::vector<Prediction>& preds, const AnnotationFile& gt) {
    using instructions::SqaTask;
    const auto index = index_predictions(preds, true);
    struct Column {
        std::vector<double> pred, truth;
        std::size_t evaluated = 0, failures = 0, correct = 0;
    };
    std::map<SqaTask, Column> cols;
    for (auto t : instructions::kSqaTasks) cols[t];
    for (const auto& obj : gt.objects) {
        std::map<SqaTask, double> truth;
        try {
            truth = sqa_ground_truth(obj, gt.camera);
        } catch (const Error& e) {
            if (e.code() != Errc::RayMissesGround) throw;
            continue;  // no ground truth exists for objects above the horizon
        }
        for (auto t : instructions::kSqaTasks) {
            Column& c = cols[t];
            ++c.evaluated;
            std::optional<double> value;
            if (auto it = index.find(obj.id + "\x1f" + std::string(instructions::to_string(t)));
                it != index.end() && it->second->answer) {
                value = extract_meters(*it->second->answer);
            }
            if (!value) {
                ++c.failures;
                continue;
            }
            c.pred.push_back(*value);
            c.truth.push_back(truth.at(t));
            if (within_tolerance(*value, truth.at(t))) ++c.correct;
        }
    }
    EvalReport report{"sqa", {}};
    for (const auto& [task, c] : cols) {
        MetricBundle& m = report.metrics[std::string(instructions::to_string(task))];
        m.unit = "m";
        m.n_evaluated = c.evaluated;
        m.n_parse_failures = c.failures;
        m.acc_5pct = ratio(c.correct, c.evaluated);
        if (!c.pred.empty()) {
            const auto r = eval_regression(c.pred, c.truth);
            m.mae = r.mae;
            m.rmse = r.rmse;
            m.r_squared = r.r_squared;
        }
    }
    return report;
}

EvalReport evaluate_retrieval(const std::vector<Prediction>& preds, const AnnotationFile& gt,
                              const EvalOptions& opts) {
    const auto index = index_predictions(preds, false);
    std::vector<std::optional<geometry::Box3D>> p;
    std::vector<geometry::Box3D> g;
    std::vector<geometry::CameraModel> cams;
    for (const auto& obj : gt.objects) {
        geometry::Box3D truth;
        try {
            truth = geometry::derive_box3d(obj.obb, obj.dims_m(), gt.camera, opts.inflation);
        } catch (const Error& e) {
            if (e.code() != Errc::RayMissesGround && e.code() != Errc::DegenerateYaw) throw;
            continue;
        }
        g.push_back(truth);
        cams.push_back(gt.camera);
        std::optional<geometry::Box3D> box;
        if (auto it = index.find(obj.id); it != index.end()) {
            if (auto loc = prediction_location(*it->second)) {
                if (auto* b = std::get_if<geometry::Box3D>(&*loc)) box = *b;
            }
        }
        p.push_back(box);
    }
    const auto score = eval_retrieval(p, g, cams);
    EvalReport report{"retrieval", {}};
    MetricBundle& m = report.metrics["retrieval"];
    m.acc_at_bev_025 = score.accuracy;
    m.n_evaluated = score.n_evaluated;
    m.n_parse_failures = score.n_missing;
    return report;
}

namespace {

// "color: red" -> "red" when the label names the attribute itself.
std::string strip_label(const std::string& answer, const std::string& name) {
    const auto colon = answer.find(':');
    if (colon == std::string::npos) return answer;
    if (normalize_text(answer.substr(0, colon)) != normalize_text(name)) return answer;
    auto start = answer.find_first_not_of(" \t", colon + 1);
    return start == std::string::npos ? std::string() : answer.substr(start);
}

}  // namespace

EvalReport evaluate_attributes(const std::vector<Prediction>& preds, const AnnotationFile& gt,
                               const EvalOptions& opts) {
    const auto index = index_predictions(preds, true);
    std::set<std::string> names;
    for (const auto& p : preds) {
        if (p.task) names.insert(*p.task);
    }
    EvalReport report{"attribute", {}};
    for (const auto& name : names) {
        std::vector<std::optional<std::string>> p;
        std::vector<std::string> g;
        for (const auto& obj : gt.objects) {
            auto truth = obj.attribute(name);
            if (!truth) continue;
            g.push_back(*truth);
            auto it = index.find(obj.id + "\x1f" + name);
            std::optional<std::string> answer;
            if (it != index.end() && it->second->answer) answer = strip_label(*it->second->answer, name);
            p.push_back(std::move(answer));
        }
        const auto score = eval_attributes(p, g, attribute_kind(name), opts.price_tol);
        MetricBundle& m = report.metrics[name];
        m.accuracy = score.accuracy;
        m.n_evaluated = score.n_evaluated;
        m.n_parse_failures = score.n_missing;
    }
    return report;
}

}  // namespace skyground::eval
