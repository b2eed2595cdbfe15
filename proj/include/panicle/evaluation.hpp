#pragma once

#include "panicle/dataset.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace panicle {

struct RankedDetection {
    std::string image_id;
    ScoredBox detection;
    bool true_positive = false;
};

/// Greedy matching outcome. `ranked` holds every detection at or above the
/// score floor in global rank order.
struct MatchReport {
    std::vector<RankedDetection> ranked;
    std::map<std::string, std::size_t> false_negatives;  // per image
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t total_ground_truth = 0;

    std::vector<bool> flags() const;
};

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

using PrCurve = std::vector<PrPoint>;

enum class ApMode {
    Literal,       ///< sum_k (R_k - R_{k-1}) P_k over the raw ranked points
    Interpolated,  ///< same sum after replacing P_k by max_{j >= k} P_j
};

struct CountErrors {
    double mape = 0.0;  ///< fraction, not percent
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
    std::vector<double> errors;  ///< e_i = predicted_i - C_i
};

struct CountPair {
    std::int64_t ground_truth = 0;
    std::int64_t predicted = 0;
};

/// Rank order across images: score descending, then x_min ascending, then
/// image_id lexicographic, then the remaining box corners. Each detection
/// takes the highest-IoU still-unmatched ground-truth box of its image when
/// that IoU reaches `iou_threshold`. Images are matched in parallel.
/// Throws DomainError(ImageMismatch) when `det` names an image absent from `gt`.
MatchReport match(const GroundTruthSet& gt, const DetectionSet& det, double iou_threshold = 0.5,
                  double score_floor = 0.0);

/// P_k = cumTP_k / k, R_k = cumTP_k / total_gt. Throws
/// DomainError(EmptyGroundTruth) when total_gt is 0.
PrCurve pr_curve(const std::vector<bool>& flags, std::size_t total_gt);
PrCurve pr_curve(const MatchReport& report);

double average_precision(const PrCurve& curve, ApMode mode = ApMode::Literal);

/// Throws DomainError(InsufficientData) on an empty list and
/// DomainError(ZeroGroundTruthCount) when any C_i is 0.
CountErrors count_errors(std::span<const CountPair> pairs);

/// Per-image count of detections with score >= score_floor and
/// area >= min_area.
std::map<std::string, std::int64_t> count_detections(const DetectionSet& det, double score_floor,
                                                     double min_area);

namespace reference {

/// Single pass over all detections in global rank order.
MatchReport match(const GroundTruthSet& gt, const DetectionSet& det, double iou_threshold,
                  double score_floor);

std::map<std::string, std::int64_t> count_detections(const DetectionSet& det, double score_floor,
                                                     double min_area);

}  // namespace reference

}  // namespace panicle
