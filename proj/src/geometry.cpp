#include "panicle/geometry.hpp"

#include "panicle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace panicle {

namespace {

std::string describe(double x0, double y0, double x1, double y1) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << x0 << ", " << y0 << ", " << x1 << ", " << y1 << ")";
    return os.str();
}

std::vector<ScoredBox> ranked(std::span<const ScoredBox> boxes) {
    std::vector<ScoredBox> sorted(boxes.begin(), boxes.end());
    std::stable_sort(sorted.begin(), sorted.end(), ranks_before);
    return sorted;
}

}  // namespace

BoundingBox::BoundingBox(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
    if (!std::isfinite(x_min) || !std::isfinite(y_min) || !std::isfinite(x_max) ||
        !std::isfinite(y_max)) {
        throw ValidationError("non-finite box coordinate " + describe(x_min, y_min, x_max, y_max));
    }
    if (!(x_max > x_min) || !(y_max > y_min)) {
        throw ValidationError("zero-area or inverted box " + describe(x_min, y_min, x_max, y_max));
    }
}

BoundingBox BoundingBox::from_xywh(double x, double y, double w, double h) {
    if (!(w > 0.0) || !(h > 0.0)) {
        throw ValidationError("box width and height must be positive, got w=" + std::to_string(w) +
                              " h=" + std::to_string(h));
    }
    return BoundingBox(x, y, x + w, y + h);
}

BoundingBox BoundingBox::translated(double dx, double dy) const {
    return BoundingBox(x_min_ + dx, y_min_ + dy, x_max_ + dx, y_max_ + dy);
}

BoundingBox BoundingBox::scaled(double s) const {
    return BoundingBox(x_min_ * s, y_min_ * s, x_max_ * s, y_max_ * s);
}

ScoredBox::ScoredBox(BoundingBox box, double score) : box_(box), score_(score) {
    if (!(score >= 0.0 && score <= 1.0)) {
        throw ValidationError("score out of range [0, 1]: " + std::to_string(score));
    }
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
    const double w = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
    const double h = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
    const double inter = intersection_area(a, b);
    if (inter <= 0.0) return 0.0;
    const double uni = a.area() + b.area() - inter;
    return std::clamp(inter / uni, 0.0, 1.0);
}

bool ranks_before(const ScoredBox& a, const ScoredBox& b) noexcept {
    if (a.score() != b.score()) return a.score() > b.score();
    const auto& p = a.box();
    const auto& q = b.box();
    if (p.x_min() != q.x_min()) return p.x_min() < q.x_min();
    if (p.y_min() != q.y_min()) return p.y_min() < q.y_min();
    if (p.x_max() != q.x_max()) return p.x_max() < q.x_max();
    return p.y_max() < q.y_max();
}

std::vector<ScoredBox> nms(std::span<const ScoredBox> boxes, double iou_threshold) {
    const std::vector<ScoredBox> sorted = ranked(boxes);
    const auto n = static_cast<std::int64_t>(sorted.size());
    std::vector<unsigned char> suppressed(sorted.size(), 0);
    std::vector<ScoredBox> kept;
    for (std::int64_t i = 0; i < n; ++i) {
        if (suppressed[i]) continue;
        kept.push_back(sorted[i]);
        const BoundingBox& anchor = sorted[i].box();
#pragma omp parallel for schedule(static) if (n - i > 256)
        for (std::int64_t j = i + 1; j < n; ++j) {
            if (!suppressed[j] && iou(anchor, sorted[j].box()) > iou_threshold) suppressed[j] = 1;
        }
    }
    return kept;
}

namespace reference {

std::vector<ScoredBox> nms(std::span<const ScoredBox> boxes, double iou_threshold) {
    std::vector<ScoredBox> kept;
    for (const ScoredBox& candidate : ranked(boxes)) {
        const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const ScoredBox& k) {
            return iou(k.box(), candidate.box()) > iou_threshold;
        });
        if (!overlaps) kept.push_back(candidate);
    }
    return kept;
}

}  // namespace reference

}  // namespace panicle
