#pragma once

#include "panicle/dataset.hpp"
#include "panicle/evaluation.hpp"
#include "panicle/flowering.hpp"

#include <string>
#include <vector>

namespace panicle {

struct EvaluationConfig {
    double iou_threshold = 0.5;
    double ap_score_floor = 0.0;
    double count_score_floor = 0.25;
    double min_area = 0.0;
    ApMode ap_mode = ApMode::Literal;
    /// Drop images without ground truth from the count metrics (listed in the
    /// report) instead of failing with ZeroGroundTruthCount.
    bool exclude_zero_ground_truth = false;
};

struct EvaluationSummary {
    EvaluationConfig config;
    std::size_t images = 0;
    std::size_t ground_truth_boxes = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double ap = 0.0;
    CountErrors counts;
    std::vector<std::string> excluded_images;
};

/// AP over the full ranking plus per-image count errors at the counting
/// operating point.
EvaluationSummary evaluate(const GroundTruthSet& gt, const DetectionSet& det,
                           const EvaluationConfig& config = {});

std::string to_json(const EvaluationSummary& summary);
/// Aligned two-column table (rows AP, MAPE, MAE, RMSE) followed by the
/// configuration block.
std::string to_table(const EvaluationSummary& summary);

struct FloweringReport {
    CountSeries series;
    CubicFit fit;
    FloweringEstimate estimate;
    std::string source;
    double score_floor = 0.0;
    double min_area = 0.0;
};

std::string to_json(const FloweringReport& report);

std::string_view to_string(ApMode mode) noexcept;

}  // namespace panicle
