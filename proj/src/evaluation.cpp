#include "panicle/evaluation.hpp"

#include "panicle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace panicle {

namespace {

struct Candidate {
    const std::string* image_id;
    const ScoredBox* detection;
    std::size_t input_index;
};

bool candidate_before(const Candidate& a, const Candidate& b) {
    const ScoredBox& p = *a.detection;
    const ScoredBox& q = *b.detection;
    if (p.score() != q.score()) return p.score() > q.score();
    if (p.box().x_min() != q.box().x_min()) return p.box().x_min() < q.box().x_min();
    if (*a.image_id != *b.image_id) return *a.image_id < *b.image_id;
    if (p.box().y_min() != q.box().y_min()) return p.box().y_min() < q.box().y_min();
    if (p.box().x_max() != q.box().x_max()) return p.box().x_max() < q.box().x_max();
    if (p.box().y_max() != q.box().y_max()) return p.box().y_max() < q.box().y_max();
    return a.input_index < b.input_index;
}

void check_images(const GroundTruthSet& gt, const DetectionSet& det) {
    for (const auto& image : det.images()) {
        if (!gt.find_image(image.image_id)) {
            throw DomainError(ErrorCode::ImageMismatch,
                              "detections reference image '" + image.image_id +
                                  "' which has no ground truth record");
        }
    }
}

std::vector<Candidate> ranked_candidates(const DetectionSet& det, const std::string& image_id,
                                         double score_floor) {
    std::vector<Candidate> out;
    const auto& list = det.detections_for(image_id);
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].score() >= score_floor) out.push_back({&image_id, &list[i], i});
    }
    std::sort(out.begin(), out.end(), candidate_before);
    return out;
}

/// Greedy assignment of one detection; returns true on a match.
bool assign(const ScoredBox& d, const std::vector<BoundingBox>& truth, std::vector<char>& taken,
            double iou_threshold) {
    double best = -1.0;
    std::size_t best_index = truth.size();
    for (std::size_t g = 0; g < truth.size(); ++g) {
        if (taken[g]) continue;
        const double v = iou(d.box(), truth[g]);
        if (v > best) {
            best = v;
            best_index = g;
        }
    }
    if (best_index == truth.size() || best < iou_threshold) return false;
    taken[best_index] = 1;
    return true;
}

MatchReport finish(std::vector<RankedDetection> ranked, std::map<std::string, std::size_t> fns,
                   std::size_t total_gt) {
    MatchReport report;
    report.ranked = std::move(ranked);
    report.false_negatives = std::move(fns);
    report.total_ground_truth = total_gt;
    for (const auto& r : report.ranked) (r.true_positive ? report.tp : report.fp)++;
    for (const auto& [id, n] : report.false_negatives) report.fn += n;
    return report;
}

}  // namespace

std::vector<bool> MatchReport::flags() const {
    std::vector<bool> out;
    out.reserve(ranked.size());
    for (const auto& r : ranked) out.push_back(r.true_positive);
    return out;
}

MatchReport match(const GroundTruthSet& gt, const DetectionSet& det, double iou_threshold,
                  double score_floor) {
    check_images(gt, det);
    const auto& images = gt.images();
    const auto n_images = static_cast<std::int64_t>(images.size());

    // Greedy matching only interacts within an image, so each image can be
    // processed in its own rank order and the results merged afterwards.
    std::vector<std::vector<Candidate>> candidates(images.size());
    std::vector<std::vector<char>> matched(images.size());
    std::vector<std::size_t> misses(images.size(), 0);

#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n_images; ++i) {
        const auto& id = images[static_cast<std::size_t>(i)].image_id;
        const auto& truth = gt.boxes_for(id);
        auto& cands = candidates[static_cast<std::size_t>(i)];
        if (det.find_image(id)) cands = ranked_candidates(det, id, score_floor);
        auto& flags = matched[static_cast<std::size_t>(i)];
        flags.resize(cands.size());
        std::vector<char> taken(truth.size(), 0);
        std::size_t hits = 0;
        for (std::size_t k = 0; k < cands.size(); ++k) {
            flags[k] = assign(*cands[k].detection, truth, taken, iou_threshold) ? 1 : 0;
            hits += flags[k];
        }
        misses[static_cast<std::size_t>(i)] = truth.size() - hits;
    }

    struct Tagged {
        Candidate candidate;
        bool hit;
    };
    std::vector<Tagged> all;
    std::map<std::string, std::size_t> fns;
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (std::size_t k = 0; k < candidates[i].size(); ++k) {
            all.push_back({candidates[i][k], matched[i][k] != 0});
        }
        fns[images[i].image_id] = misses[i];
    }
    std::sort(all.begin(), all.end(),
              [](const Tagged& a, const Tagged& b) { return candidate_before(a.candidate, b.candidate); });

    std::vector<RankedDetection> ranked;
    ranked.reserve(all.size());
    for (const auto& t : all) ranked.push_back({*t.candidate.image_id, *t.candidate.detection, t.hit});
    return finish(std::move(ranked), std::move(fns), gt.total_boxes());
}

PrCurve pr_curve(const std::vector<bool>& flags, std::size_t total_gt) {
    if (total_gt == 0) {
        throw DomainError(ErrorCode::EmptyGroundTruth, "recall is undefined without ground truth");
    }
    PrCurve curve;
    curve.reserve(flags.size());
    std::size_t cum_tp = 0;
    for (std::size_t k = 0; k < flags.size(); ++k) {
        if (flags[k]) ++cum_tp;
        curve.push_back({static_cast<double>(cum_tp) / static_cast<double>(total_gt),
                         static_cast<double>(cum_tp) / static_cast<double>(k + 1)});
    }
    return curve;
}

PrCurve pr_curve(const MatchReport& report) {
    return pr_curve(report.flags(), report.total_ground_truth);
}

double average_precision(const PrCurve& curve, ApMode mode) {
    std::vector<double> precision(curve.size());
    for (std::size_t k = 0; k < curve.size(); ++k) precision[k] = curve[k].precision;
    if (mode == ApMode::Interpolated) {
        for (std::size_t k = curve.size(); k-- > 1;) {
            precision[k - 1] = std::max(precision[k - 1], precision[k]);
        }
    }
    double ap = 0.0;
    double previous_recall = 0.0;
    for (std::size_t k = 0; k < curve.size(); ++k) {
        ap += (curve[k].recall - previous_recall) * precision[k];
        previous_recall = curve[k].recall;
    }
    return ap;
}

CountErrors count_errors(std::span<const CountPair> pairs) {
    if (pairs.empty()) throw DomainError(ErrorCode::InsufficientData, "no count pairs");
    CountErrors out;
    out.n = pairs.size();
    double sum_pct = 0.0;
    double sum_abs = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        if (p.ground_truth <= 0) {
            throw DomainError(ErrorCode::ZeroGroundTruthCount,
                              "ground-truth count of sample " + std::to_string(i) +
                                  " is not positive; MAPE is undefined");
        }
        const double e = static_cast<double>(p.predicted - p.ground_truth);
        out.errors.push_back(e);
        sum_pct += std::abs(e) / static_cast<double>(p.ground_truth);
        sum_abs += std::abs(e);
        sum_sq += e * e;
    }
    const double n = static_cast<double>(out.n);
    out.mape = sum_pct / n;
    out.mae = sum_abs / n;
    out.rmse = std::sqrt(sum_sq / n);
    return out;
}

std::map<std::string, std::int64_t> count_detections(const DetectionSet& det, double score_floor,
                                                     double min_area) {
    const auto& images = det.images();
    const auto n_images = static_cast<std::int64_t>(images.size());
    std::vector<std::int64_t> counts(images.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n_images; ++i) {
        std::int64_t n = 0;
        for (const auto& d : det.detections_for(images[static_cast<std::size_t>(i)].image_id)) {
            if (d.score() >= score_floor && d.box().area() >= min_area) ++n;
        }
        counts[static_cast<std::size_t>(i)] = n;
    }
    std::map<std::string, std::int64_t> out;
    for (std::size_t i = 0; i < images.size(); ++i) out[images[i].image_id] = counts[i];
    return out;
}

namespace reference {

MatchReport match(const GroundTruthSet& gt, const DetectionSet& det, double iou_threshold,
                  double score_floor) {
    check_images(gt, det);
    std::vector<Candidate> all;
    for (const auto& image : det.images()) {
        auto c = ranked_candidates(det, image.image_id, score_floor);
        all.insert(all.end(), c.begin(), c.end());
    }
    std::sort(all.begin(), all.end(), candidate_before);

    std::map<std::string, std::vector<char>> taken;
    for (const auto& image : gt.images()) taken[image.image_id].assign(gt.boxes_for(image.image_id).size(), 0);

    std::vector<RankedDetection> ranked;
    for (const auto& c : all) {
        const bool hit = assign(*c.detection, gt.boxes_for(*c.image_id), taken[*c.image_id], iou_threshold);
        ranked.push_back({*c.image_id, *c.detection, hit});
    }
    std::map<std::string, std::size_t> fns;
    for (const auto& [id, flags] : taken) {
        fns[id] = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 0));
    }
    return finish(std::move(ranked), std::move(fns), gt.total_boxes());
}

std::map<std::string, std::int64_t> count_detections(const DetectionSet& det, double score_floor,
                                                     double min_area) {
    std::map<std::string, std::int64_t> out;
    for (const auto& image : det.images()) {
        const auto& list = det.detections_for(image.image_id);
        out[image.image_id] = std::count_if(list.begin(), list.end(), [&](const ScoredBox& d) {
            return d.score() >= score_floor && d.box().area() >= min_area;
        });
    }
    return out;
}

}  // namespace reference

}  // namespace panicle
