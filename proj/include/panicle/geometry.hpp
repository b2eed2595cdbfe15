#pragma once

#include <span>
#include <vector>

namespace panicle {

/// Axis-aligned rectangle in pixel coordinates, stored as corner pairs.
/// Construction rejects non-finite, zero-area and inverted boxes.
class BoundingBox {
public:
    /// Throws ValidationError unless x_max > x_min and y_max > y_min.
    BoundingBox(double x_min, double y_min, double x_max, double y_max);

    static BoundingBox from_xywh(double x, double y, double w, double h);

    double x_min() const noexcept { return x_min_; }
    double y_min() const noexcept { return y_min_; }
    double x_max() const noexcept { return x_max_; }
    double y_max() const noexcept { return y_max_; }
    double width() const noexcept { return x_max_ - x_min_; }
    double height() const noexcept { return y_max_ - y_min_; }
    double area() const noexcept { return width() * height(); }

    BoundingBox translated(double dx, double dy) const;
    BoundingBox scaled(double s) const;

    /// True when this box lies inside [x0, x1] x [y0, y1] (closed).
    bool within(double x0, double y0, double x1, double y1) const noexcept {
        return x_min_ >= x0 && y_min_ >= y0 && x_max_ <= x1 && y_max_ <= y1;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

private:
    double x_min_;
    double y_min_;
    double x_max_;
    double y_max_;
};

/// A detection: box plus detector confidence in [0, 1].
class ScoredBox {
public:
    ScoredBox(BoundingBox box, double score);

    const BoundingBox& box() const noexcept { return box_; }
    double score() const noexcept { return score_; }

    friend bool operator==(const ScoredBox&, const ScoredBox&) = default;

private:
    BoundingBox box_;
    double score_;
};

double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Intersection over union; 0 for disjoint interiors, symmetric.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Total ranking order used everywhere a detection list is sorted: score
/// descending, then x_min, y_min, x_max, y_max ascending.
bool ranks_before(const ScoredBox& a, const ScoredBox& b) noexcept;

/// Greedy non-maximum suppression. A box is dropped when its IoU with an
/// already retained, higher-ranked box exceeds `iou_threshold`. Output is in
/// rank order. The inner suppression sweep runs under OpenMP.
std::vector<ScoredBox> nms(std::span<const ScoredBox> boxes, double iou_threshold);

namespace reference {

/// Single-threaded NMS kept as the oracle for the parallel kernel.
std::vector<ScoredBox> nms(std::span<const ScoredBox> boxes, double iou_threshold);

}  // namespace reference

}  // namespace panicle
