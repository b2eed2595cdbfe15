#include "panicle/flowering.hpp"

#include "panicle/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace panicle {

namespace {

constexpr double kSampleStep = 0.1;
constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

}  // namespace

CurvePlot emit_curve(const CubicFit& fit, std::span<const SeriesPoint> points,
                     const FloweringEstimate& estimate) {
    CurvePlot plot;
    double first = points.front().day;
    double last = points.front().day;
    for (const auto& p : points) {
        first = std::min(first, p.day);
        last = std::max(last, p.day);
    }

    const auto rows = static_cast<std::size_t>(std::floor((last - first) / kSampleStep + 1e-9)) + 1;
    std::vector<SeriesPoint> samples;
    samples.reserve(rows);
    plot.csv = "day,fitted_count\n";
    for (std::size_t k = 0; k < rows; ++k) {
        const double t = first + static_cast<double>(k) * kSampleStep;
        samples.push_back({t, fit(t)});
        plot.csv += fixed(t, 2) + ',' + fixed(fit(t), 6) + '\n';
    }

    double y_max = estimate.ultimate_count;
    double y_min = 0.0;
    for (const auto& s : samples) {
        y_max = std::max(y_max, s.count);
        y_min = std::min(y_min, s.count);
    }
    for (const auto& p : points) y_max = std::max(y_max, p.count);
    const double y_step = nice_step(std::max(y_max - y_min, 1.0), 6);
    y_max = std::ceil(y_max / y_step) * y_step;
    y_min = std::floor(y_min / y_step) * y_step;
    const double x_lo = std::floor(first) - 1.0;
    const double x_hi = std::ceil(last) + 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double t) { return kLeft + (t - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double c) { return kTop + (y_max - c) / (y_max - y_min) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
           fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + ' ' + fixed(kHeight, 0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fixed(kWidth / 2, 1) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">Panicle Count Time Series</text>\n";

    // Axes and ticks.
    svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + fixed(kLeft, 2) + "\" y1=\"" + fixed(kTop + plot_h, 2) + "\" x2=\"" +
           fixed(kLeft + plot_w, 2) + "\" y2=\"" + fixed(kTop + plot_h, 2) + "\"/>\n";
    svg += "<line x1=\"" + fixed(kLeft, 2) + "\" y1=\"" + fixed(kTop, 2) + "\" x2=\"" + fixed(kLeft, 2) +
           "\" y2=\"" + fixed(kTop + plot_h, 2) + "\"/>\n";
    svg += "</g>\n<g class=\"ticks\">\n";
    const double x_step = nice_step(x_hi - x_lo, 8);
    for (double t = std::ceil(x_lo / x_step) * x_step; t <= x_hi + 1e-9; t += x_step) {
        svg += "<text x=\"" + fixed(sx(t), 2) + "\" y=\"" + fixed(kTop + plot_h + 18, 2) +
               "\" text-anchor=\"middle\">" + fixed(t, 0) + "</text>\n";
    }
    for (double c = y_min; c <= y_max + 1e-9; c += y_step) {
        svg += "<text x=\"" + fixed(kLeft - 8, 2) + "\" y=\"" + fixed(sy(c) + 4, 2) +
               "\" text-anchor=\"end\">" + fixed(c, 0) + "</text>\n";
    }
    svg += "</g>\n";
    svg += "<text x=\"" + fixed(kLeft + plot_w / 2, 2) + "\" y=\"" + fixed(kHeight - 16, 2) +
           "\" text-anchor=\"middle\">Days after planting</text>\n";
    svg += "<text x=\"18\" y=\"" + fixed(kTop + plot_h / 2, 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           fixed(kTop + plot_h / 2, 2) + ")\">Panicle count</text>\n";

    svg += "<polyline class=\"fitted-curve\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (k > 0) svg += ' ';
        svg += fixed(sx(samples[k].day), 2) + ',' + fixed(sy(samples[k].count), 2);
    }
    svg += "\"/>\n";

    svg += "<line class=\"half-level\" data-value=\"" + format_real(estimate.half_level) + "\" x1=\"" +
           fixed(kLeft, 2) + "\" y1=\"" + fixed(sy(estimate.half_level), 2) + "\" x2=\"" +
           fixed(kLeft + plot_w, 2) + "\" y2=\"" + fixed(sy(estimate.half_level), 2) +
           "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    svg += "<line class=\"flowering-day\" data-value=\"" + format_real(estimate.flowering_day) +
           "\" x1=\"" + fixed(sx(estimate.flowering_day), 2) + "\" y1=\"" + fixed(kTop, 2) + "\" x2=\"" +
           fixed(sx(estimate.flowering_day), 2) + "\" y2=\"" + fixed(kTop + plot_h, 2) +
           "\" stroke=\"firebrick\" stroke-dasharray=\"3 3\"/>\n";
    svg += "<text x=\"" + fixed(sx(estimate.flowering_day) + 6, 2) + "\" y=\"" + fixed(kTop + 14, 2) +
           "\" fill=\"firebrick\">flowering day " + fixed(estimate.flowering_day, 2) + "</text>\n";

    svg += "<g class=\"observations\" fill=\"darkorange\">\n";
    for (const auto& p : points) {
        svg += "<circle cx=\"" + fixed(sx(p.day), 2) + "\" cy=\"" + fixed(sy(p.count), 2) +
               "\" r=\"4\"/>\n";
    }
    svg += "</g>\n</svg>\n";
    plot.svg = std::move(svg);
    return plot;
}

}  // namespace panicle
