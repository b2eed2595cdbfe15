#include "panicle/flowering.hpp"

#include "panicle/errors.hpp"
#include "panicle/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace panicle {

std::vector<SeriesPoint> to_points(const CountSeries& series) {
    std::vector<SeriesPoint> out;
    out.reserve(series.size());
    for (const auto& o : series.observations()) {
        out.push_back({static_cast<double>(o.days_after_planting), static_cast<double>(o.count)});
    }
    return out;
}

double CubicFit::operator()(double day) const noexcept {
    const double u = day - t_center;
    const auto& a = coefficients;
    return a[0] + u * (a[1] + u * (a[2] + u * a[3]));
}

double CubicFit::slope(double day) const noexcept {
    const double u = day - t_center;
    const auto& a = coefficients;
    return a[1] + u * (2.0 * a[2] + u * 3.0 * a[3]);
}

CubicFit fit_cubic(std::span<const SeriesPoint> points) {
    constexpr std::size_t kCols = 4;
    const std::size_t n = points.size();
    if (n < kCols) {
        throw DomainError(ErrorCode::InsufficientData,
                          "a cubic fit needs at least 4 observations, got " + std::to_string(n));
    }
    std::set<double> distinct;
    for (const auto& p : points) {
        if (!std::isfinite(p.day) || !std::isfinite(p.count)) {
            throw DomainError(ErrorCode::DegenerateDesign, "non-finite observation");
        }
        distinct.insert(p.day);
    }
    if (distinct.size() < kCols) {
        throw DomainError(ErrorCode::DegenerateDesign,
                          "a cubic fit needs at least 4 distinct days, got " +
                              std::to_string(distinct.size()));
    }

    CubicFit fit;
    double sum = 0.0;
    for (const auto& p : points) sum += p.day;
    fit.t_center = sum / static_cast<double>(n);

    // Column-major design matrix in centered time and the right-hand side.
    std::vector<double> a(n * kCols);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = points[i].day - fit.t_center;
        double power = 1.0;
        for (std::size_t j = 0; j < kCols; ++j) {
            a[j * n + i] = power;
            power *= u;
        }
        y[i] = points[i].count;
    }
    auto at = [&](std::size_t row, std::size_t col) -> double& { return a[col * n + row]; };

    // Householder QR, applying each reflector to the remaining columns and y.
    std::array<double, kCols> diag{};
    for (std::size_t k = 0; k < kCols; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm = std::hypot(norm, at(i, k));
        if (norm == 0.0) throw DomainError(ErrorCode::DegenerateDesign, "rank-deficient design");
        const double alpha = at(k, k) > 0.0 ? -norm : norm;
        at(k, k) -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) vnorm2 += at(i, k) * at(i, k);
        for (std::size_t j = k + 1; j < kCols; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += at(i, k) * at(i, j);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) at(i, j) -= f * at(i, k);
        }
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += at(i, k) * y[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < n; ++i) y[i] -= f * at(i, k);
        diag[k] = alpha;
    }
    const double scale = std::abs(diag[0]);
    for (double d : diag) {
        if (std::abs(d) <= 1e-13 * scale) {
            throw DomainError(ErrorCode::DegenerateDesign, "ill-conditioned design");
        }
    }
    for (std::size_t k = kCols; k-- > 0;) {
        double s = y[k];
        for (std::size_t j = k + 1; j < kCols; ++j) s -= at(k, j) * fit.coefficients[j];
        fit.coefficients[k] = s / diag[k];
    }

    double sse = 0.0;
    for (const auto& p : points) {
        const double r = fit(p.day) - p.count;
        sse += r * r;
    }
    fit.residual_rms = std::sqrt(sse / static_cast<double>(n));
    return fit;
}

CubicFit fit_cubic(const CountSeries& series) {
    const auto points = to_points(series);
    return fit_cubic(points);
}

FloweringEstimate flowering_time(std::span<const SeriesPoint> points, const CubicFit& fit) {
    if (points.empty()) throw DomainError(ErrorCode::InsufficientData, "empty series");
    FloweringEstimate est;
    double first = points.front().day;
    double last = points.front().day;
    est.ultimate_count = points.front().count;
    for (const auto& p : points) {
        first = std::min(first, p.day);
        last = std::max(last, p.day);
        est.ultimate_count = std::max(est.ultimate_count, p.count);
    }
    if (!(est.ultimate_count > 0.0)) {
        throw DomainError(ErrorCode::AllZero, "every count is zero; no half-level crossing exists");
    }
    est.half_level = est.ultimate_count / 2.0;
    const double half = est.half_level;
    auto excess = [&](double t) { return fit(t) - half; };

    // Grid points first + k * step; the final point is pinned to `last`.
    const auto steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor((last - first) / kCrossingScanStep + 1e-9)));
    auto grid = [&](std::size_t k) {
        return k >= steps ? last : first + static_cast<double>(k) * kCrossingScanStep;
    };

    double curve_max = fit(first);
    if (excess(first) == 0.0 && fit.slope(first) > 0.0) {
        est.flowering_day = est.day_lo = first;
        est.day_hi = grid(1);
        return est;
    }
    for (std::size_t k = 0; k < steps; ++k) {
        double lo = grid(k);
        double hi = grid(k + 1);
        curve_max = std::max(curve_max, fit(hi));
        if (!(excess(lo) < 0.0 && excess(hi) >= 0.0)) continue;

        est.day_lo = lo;
        est.day_hi = hi;
        double mid = hi;
        for (int iter = 0; iter < 200; ++iter) {
            mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double e = excess(mid);
            if (e < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Both ends now bracket the root to rounding width; keep the closer one.
        est.flowering_day = std::abs(excess(lo)) <= std::abs(excess(hi)) ? lo : hi;
        if (std::abs(excess(est.flowering_day)) > kCrossingTolerance) {
            throw DomainError(ErrorCode::NoCrossing, "bisection failed to reach the crossing tolerance");
        }
        return est;
    }
    std::ostringstream msg;
    msg << "fitted curve never rises through the half level " << half << " within days [" << first
        << ", " << last << "]; curve maximum in range is " << curve_max;
    throw DomainError(ErrorCode::NoCrossing, msg.str());
}

FloweringEstimate flowering_time(const CountSeries& series, const CubicFit& fit) {
    const auto points = to_points(series);
    return flowering_time(points, fit);
}

CountSeries build_series(const std::map<int, DetectionSet>& per_date, double score_floor,
                         double min_area) {
    std::vector<Observation> observations;
    for (const auto& [day, det] : per_date) {
        std::int64_t total = 0;
        for (const auto& [id, n] : count_detections(det, score_floor, min_area)) total += n;
        observations.push_back({day, total});
    }
    return CountSeries(std::move(observations));
}

}  // namespace panicle
