#pragma once

#include "panicle/dataset.hpp"

#include <array>
#include <map>
#include <span>
#include <string>

namespace panicle {

struct SeriesPoint {
    double day = 0.0;
    double count = 0.0;
};

std::vector<SeriesPoint> to_points(const CountSeries& series);

/// Least-squares cubic in centered time u = t - t_center:
/// p(t) = a0 + a1 u + a2 u^2 + a3 u^3.
struct CubicFit {
    std::array<double, 4> coefficients{};
    double t_center = 0.0;
    double residual_rms = 0.0;

    double operator()(double day) const noexcept;
    double slope(double day) const noexcept;
};

/// Solves the 4-column least-squares problem with Householder QR.
/// Throws DomainError(InsufficientData) below 4 points and
/// DomainError(DegenerateDesign) with fewer than 4 distinct days.
CubicFit fit_cubic(std::span<const SeriesPoint> points);
CubicFit fit_cubic(const CountSeries& series);

struct FloweringEstimate {
    double flowering_day = 0.0;
    double ultimate_count = 0.0;
    double half_level = 0.0;
    double day_lo = 0.0;
    double day_hi = 0.0;
};

/// Step of the sign scan preceding bisection, in days.
inline constexpr double kCrossingScanStep = 0.01;
/// Bisection stops once |p(t) - half_level| is below this (in panicles) and
/// the bracket has collapsed to rounding width.
inline constexpr double kCrossingTolerance = 1e-6;

/// Ultimate count is the largest observed count; the estimate is the earliest
/// day in [first, last] where the fitted curve rises through half of it.
/// Throws DomainError(AllZero) or DomainError(NoCrossing).
FloweringEstimate flowering_time(std::span<const SeriesPoint> points, const CubicFit& fit);
FloweringEstimate flowering_time(const CountSeries& series, const CubicFit& fit);

/// Sums filtered per-image counts of each date's detections. Keys are days
/// after planting.
CountSeries build_series(const std::map<int, DetectionSet>& per_date, double score_floor,
                         double min_area);

struct CurvePlot {
    std::string svg;
    std::string csv;  ///< "day,fitted_count", one row per 0.1 day
};

/// Renders observations, the fitted curve, the half-level line and the
/// flowering-day marker.
CurvePlot emit_curve(const CubicFit& fit, std::span<const SeriesPoint> points,
                     const FloweringEstimate& estimate);

}  // namespace panicle
