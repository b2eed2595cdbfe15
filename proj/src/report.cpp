#include "panicle/report.hpp"

#include "panicle/errors.hpp"

#include <json.hpp>

#include <cstdio>

namespace panicle {

using json = nlohmann::ordered_json;

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string padded(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

std::string_view to_string(ApMode mode) noexcept {
    return mode == ApMode::Literal ? "literal" : "interpolated";
}

EvaluationSummary evaluate(const GroundTruthSet& gt, const DetectionSet& det,
                           const EvaluationConfig& config) {
    EvaluationSummary out;
    out.config = config;
    out.images = gt.images().size();
    out.ground_truth_boxes = gt.total_boxes();

    const MatchReport report = match(gt, det, config.iou_threshold, config.ap_score_floor);
    out.tp = report.tp;
    out.fp = report.fp;
    out.fn = report.fn;
    out.ap = average_precision(pr_curve(report), config.ap_mode);

    const auto predicted = count_detections(det, config.count_score_floor, config.min_area);
    std::vector<CountPair> pairs;
    for (const auto& image : gt.images()) {
        const auto truth = static_cast<std::int64_t>(gt.boxes_for(image.image_id).size());
        if (truth == 0 && config.exclude_zero_ground_truth) {
            out.excluded_images.push_back(image.image_id);
            continue;
        }
        auto it = predicted.find(image.image_id);
        pairs.push_back({truth, it == predicted.end() ? 0 : it->second});
    }
    out.counts = count_errors(pairs);
    return out;
}

std::string to_json(const EvaluationSummary& s) {
    json j;
    j["ap"] = s.ap;
    j["mape"] = s.counts.mape;
    j["mae"] = s.counts.mae;
    j["rmse"] = s.counts.rmse;
    j["n"] = s.counts.n;
    j["images"] = s.images;
    j["ground_truth_boxes"] = s.ground_truth_boxes;
    j["tp"] = s.tp;
    j["fp"] = s.fp;
    j["fn"] = s.fn;
    j["excluded_images"] = s.excluded_images;
    json c;
    c["iou_threshold"] = s.config.iou_threshold;
    c["ap_score_floor"] = s.config.ap_score_floor;
    c["score_floor"] = s.config.count_score_floor;
    c["min_area"] = s.config.min_area;
    c["ap_mode"] = std::string(to_string(s.config.ap_mode));
    c["exclude_zero_gt"] = s.config.exclude_zero_ground_truth;
    j["config"] = std::move(c);
    return j.dump(2) + "\n";
}

std::string to_table(const EvaluationSummary& s) {
    std::string out;
    out += padded("Metric", 8) + "Value\n";
    out += padded("AP", 8) + fixed(s.ap * 100.0, 1) + "\n";
    out += padded("MAPE", 8) + fixed(s.counts.mape, 3) + "\n";
    out += padded("MAE", 8) + fixed(s.counts.mae, 3) + "\n";
    out += padded("RMSE", 8) + fixed(s.counts.rmse, 3) + "\n";
    out += "\n";
    out += padded("images", 18) + std::to_string(s.images) + "\n";
    out += padded("ground truth", 18) + std::to_string(s.ground_truth_boxes) + "\n";
    out += padded("TP / FP / FN", 18) + std::to_string(s.tp) + " / " + std::to_string(s.fp) + " / " +
           std::to_string(s.fn) + "\n";
    out += padded("iou_threshold", 18) + fixed(s.config.iou_threshold, 3) + "\n";
    out += padded("ap_score_floor", 18) + fixed(s.config.ap_score_floor, 3) + "\n";
    out += padded("score_floor", 18) + fixed(s.config.count_score_floor, 3) + "\n";
    out += padded("min_area", 18) + fixed(s.config.min_area, 3) + "\n";
    out += padded("ap_mode", 18) + std::string(to_string(s.config.ap_mode)) + "\n";
    if (!s.excluded_images.empty()) {
        out += padded("excluded images", 18) + std::to_string(s.excluded_images.size()) + "\n";
    }
    return out;
}

std::string to_json(const FloweringReport& r) {
    json j;
    j["flowering_day"] = r.estimate.flowering_day;
    j["ultimate_count"] = r.estimate.ultimate_count;
    j["half_level"] = r.estimate.half_level;
    j["residual_rms"] = r.fit.residual_rms;
    j["bracket"] = json::array({r.estimate.day_lo, r.estimate.day_hi});
    j["t_center"] = r.fit.t_center;
    j["coefficients"] = json::array(
        {r.fit.coefficients[0], r.fit.coefficients[1], r.fit.coefficients[2], r.fit.coefficients[3]});
    json series = json::array();
    for (const auto& o : r.series.observations()) {
        series.push_back({{"days_after_planting", o.days_after_planting}, {"count", o.count}});
    }
    j["series"] = std::move(series);
    json c;
    c["source"] = r.source;
    c["score_floor"] = r.score_floor;
    c["min_area"] = r.min_area;
    c["scan_step_days"] = kCrossingScanStep;
    c["crossing_tolerance"] = kCrossingTolerance;
    j["config"] = std::move(c);
    return j.dump(2) + "\n";
}

}  // namespace panicle
