// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skyground/annotation.hpp"
#include "skyground/bbox3d.hpp"
#include "skyground/instruction_builder.hpp"

namespace skyground::eval {

inline constexpr double kGroundingThreshold = 0.5;
inline constexpr double kRetrievalThreshold = 0.25;
inline constexpr double kRelativeTolerance = 0.05;

/// First decimal number in free text, thousands separators stripped
/// ("about 1,200 mm" -> 1200). nullopt when the text holds no number.
std::optional<double> extract_numeric(std::string_view answer);

// extract_numeric converted to meters: answers mentioning mm or cm are
// rescaled, everything else is taken as meters.
std::optional<double> extract_meters(std::string_view answer);

struct AccuracyScore {
    double accuracy = 0.0;
    std::size_t n_evaluated = 0;
    std::size_t n_missing = 0;  // absent or unparseable predictions
};

// Fraction of pairs with IoU >= thresh; a missing prediction is wrong.
// Throws Error(LengthMismatch).
AccuracyScore eval_grounding(std::span<const std::optional<geometry::HorizontalBox2D>> preds,
                             std::span<const geometry::HorizontalBox2D> gts,
                             double thresh = kGroundingThreshold);

// Fraction of pairs with BEV IoU strictly above 0.25.
AccuracyScore eval_retrieval(std::span<const std::optional<geometry::Box3D>> preds,
                             std::span<const geometry::Box3D> gts,
                             std::span<const geometry::CameraModel> cams);

struct RegressionMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> r_squared;  // undefined when the ground truth has zero variance
    double acc_5pct = 0.0;
    std::size_t n = 0;
};

// |pred - gt| <= 5% of |gt| (inclusive).
bool within_tolerance(double pred, double gt, double rel = kRelativeTolerance) noexcept;

/// MAE, RMSE, R^2 about the ground-truth mean, and the inclusive 5% rule.
/// Throws Error(LengthMismatch) or Error(InvalidArgument) on empty input.
RegressionMetrics eval_regression(std::span<const double> preds, std::span<const double> gts);

enum class AttributeKind { Categorical, Numeric, Price };

AttributeKind attribute_kind(std::string_view attribute) noexcept;

// Case-insensitive, whitespace-normalized text comparison.
std::string normalize_text(std::string_view text);

/// Categorical attributes compare normalized text; numeric ones compare the
/// extracted numbers exactly, or within `price_tol` (relative) for price.
bool attribute_correct(std::string_view pred, std::string_view gt, AttributeKind kind,
                       std::optional<double> price_tol = std::nullopt);

AccuracyScore eval_attributes(std::span<const std::optional<std::string>> preds,
                              std::span<const std::string> gts, AttributeKind kind,
                              std::optional<double> price_tol = std::nullopt);

// Depth, distance (meters from the camera to the ground center) and the
// nominal dimensions (meters) of an annotated object.
std::map<instructions::SqaTask, double> sqa_ground_truth(const AnnotatedObject& obj,
                                                         const geometry::CameraModel& cam);

struct MetricBundle {
    std::optional<double> acc_at_05;
    std::optional<double> acc_at_bev_025;
    std::optional<double> mae;
    std::optional<double> rmse;
    std::optional<double> r_squared;
    std::optional<double> acc_5pct;
    std::optional<double> accuracy;
    std::size_t n_evaluated = 0;
    std::size_t n_parse_failures = 0;
    std::string unit;
};

struct EvalReport {
    std::string task;
    std::map<std::string, MetricBundle> metrics;  // keyed by sub-task

    nlohmann::ordered_json to_json() const;
    std::string to_table() const;
};

/// One line of a prediction file. `answer` holds free text; `location`
/// holds an explicit hbb/box3d field when present.
struct Prediction {
    std::string id;
    std::optional<std::string> task;       // SQA task or attribute name
    std::optional<std::string> answer;
    std::optional<std::string> location;
};

std::vector<Prediction> load_predictions(const std::filesystem::path& path);
std::vector<Prediction> parse_predictions(std::istream& in);

struct EvalOptions {
    double grounding_threshold = kGroundingThreshold;
    std::optional<double> price_tol;
    double inflation = 1.0;
};

// Scores every ground-truth object of `gt`; objects without a prediction
// count as parse failures.
EvalReport evaluate_grounding(const std::vector<Prediction>& preds, const AnnotationFile& gt,
                              const EvalOptions& opts = {});
EvalReport evaluate_sqa(const std::vector<Prediction>& preds, const AnnotationFile& gt);
EvalReport evaluate_retrieval(const std::vector<Prediction>& preds, const AnnotationFile& gt,
                              const EvalOptions& opts = {});
EvalReport evaluate_attributes(const std::vector<Prediction>& preds, const AnnotationFile& gt,
                               const EvalOptions& opts = {});

}  // namespace skyground::eval
