#include "panicle/synth.hpp"

#include "panicle/errors.hpp"
#include "panicle/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace panicle {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(ErrorCode::InvalidSpec, what);
}

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }

std::string date_id(int day) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "d%03d", day);
    return buf;
}

struct Plant {
    BoundingBox box;
    double emergence_day;
};

/// Shifts a box by (dx, dy) and then back inside [0, w] x [0, h].
BoundingBox shifted_inside(const BoundingBox& b, double dx, double dy, double w, double h) {
    double x0 = b.x_min() + dx;
    double y0 = b.y_min() + dy;
    x0 = std::clamp(x0, 0.0, w - b.width());
    y0 = std::clamp(y0, 0.0, h - b.height());
    return BoundingBox(x0, y0, x0 + b.width(), y0 + b.height());
}

double noisy_score(Rng& rng, double sd) {
    return std::clamp(1.0 - std::abs(rng.normal(0.0, sd)), 0.0, 1.0);
}

}  // namespace

ScenarioSpec ScenarioSpec::noiseless() const {
    ScenarioSpec s = *this;
    s.jitter_sd = 0.0;
    s.duplicate_rate = 0.0;
    s.miss_rate = 0.0;
    s.score_noise_sd = 0.0;
    return s;
}

void validate(const ScenarioSpec& spec) {
    require(spec.n_plants >= 0, "n_plants must be non-negative");
    require(spec.field_width > 0 && spec.field_height > 0, "field dimensions must be positive");
    require(std::isfinite(spec.emergence_midpoint), "emergence_midpoint must be finite");
    require(spec.emergence_rate > 0.0 && std::isfinite(spec.emergence_rate),
            "emergence_rate must be positive");
    require(!spec.dates.empty(), "at least one date is required");
    for (std::size_t i = 0; i < spec.dates.size(); ++i) {
        require(spec.dates[i] >= 0, "dates must be non-negative");
        require(i == 0 || spec.dates[i] > spec.dates[i - 1], "dates must be strictly increasing");
    }
    require(spec.box_size_mean > 0.0 && std::isfinite(spec.box_size_mean),
            "box_size_mean must be positive");
    require(spec.box_size_sd >= 0.0 && std::isfinite(spec.box_size_sd), "box_size_sd must be >= 0");
    require(spec.jitter_sd >= 0.0 && std::isfinite(spec.jitter_sd), "jitter_sd must be >= 0");
    require(is_fraction(spec.duplicate_rate), "duplicate_rate must lie in [0, 1]");
    require(is_fraction(spec.miss_rate), "miss_rate must lie in [0, 1]");
    require(is_fraction(spec.score_noise_sd), "score_noise_sd must lie in [0, 1]");
    // Loose upper bound on n keeps the grid cells from collapsing below a pixel.
    require(static_cast<double>(spec.n_plants) <=
                static_cast<double>(spec.field_width) * spec.field_height / 64.0,
            "too many plants for the field area");
}

Scenario generate(const ScenarioSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    const double field_w = spec.field_width;
    const double field_h = spec.field_height;

    std::vector<Plant> plants;
    if (spec.n_plants > 0) {
        const int cols = static_cast<int>(
            std::ceil(std::sqrt(static_cast<double>(spec.n_plants) * field_w / field_h)));
        const int rows = (spec.n_plants + cols - 1) / cols;
        const double cell_w = field_w / cols;
        const double cell_h = field_h / rows;
        const double max_size = 0.8 * std::min(cell_w, cell_h);
        const double min_size = std::min(4.0, max_size);
        for (int i = 0; i < spec.n_plants; ++i) {
            const double w = std::clamp(rng.normal(spec.box_size_mean, spec.box_size_sd), min_size, max_size);
            const double h = std::clamp(rng.normal(spec.box_size_mean, spec.box_size_sd), min_size, max_size);
            const double cell_x = (i % cols) * cell_w;
            const double cell_y = (i / cols) * cell_h;
            const double x0 = cell_x + rng.uniform() * (cell_w - w);
            const double y0 = cell_y + rng.uniform() * (cell_h - h);
            double u = rng.uniform();
            if (u == 0.0) u = 0x1.0p-54;
            const double day = spec.emergence_midpoint + std::log(u / (1.0 - u)) / spec.emergence_rate;
            plants.push_back({BoundingBox(x0, y0, x0 + w, y0 + h), day});
        }
    }

    Scenario out;
    out.true_flowering_day = spec.emergence_midpoint;
    std::vector<Observation> truth;
    for (int day : spec.dates) {
        ImageRecord record{date_id(day), "field_" + date_id(day) + ".png", spec.field_width,
                           spec.field_height, day};
        std::vector<BoundingBox> gt_boxes;
        std::vector<ScoredBox> det_boxes;
        for (const auto& plant : plants) {
            if (plant.emergence_day > day) continue;
            gt_boxes.push_back(plant.box);
            if (rng.bernoulli(spec.miss_rate)) continue;
            {
                const double dx = rng.normal(0.0, spec.jitter_sd);
                const double dy = rng.normal(0.0, spec.jitter_sd);
                const double score = noisy_score(rng, spec.score_noise_sd);
                det_boxes.emplace_back(shifted_inside(plant.box, dx, dy, field_w, field_h), score);
            }
            if (rng.bernoulli(spec.duplicate_rate)) {
                const double dx = rng.normal(0.0, spec.jitter_sd);
                const double dy = rng.normal(0.0, spec.jitter_sd);
                const double score = noisy_score(rng, spec.score_noise_sd);
                det_boxes.emplace_back(shifted_inside(plant.box, dx, dy, field_w, field_h), score);
            }
        }
        truth.push_back({day, static_cast<std::int64_t>(gt_boxes.size())});
        out.ground_truth.emplace(day, GroundTruthSet({record}, {{record.image_id, std::move(gt_boxes)}}));
        out.detections.emplace(day, DetectionSet({record}, {{record.image_id, std::move(det_boxes)}}));
    }
    out.true_counts = CountSeries(std::move(truth));
    return out;
}

TiledScenario generate_tiled(const TiledScenarioSpec& spec) {
    require(spec.n_panicles >= 0, "n_panicles must be non-negative");
    require(spec.box_size_min > 0.0 && spec.box_size_max >= spec.box_size_min,
            "box size range must be positive and ordered");
    require(spec.jitter_sd >= 0.0, "jitter_sd must be >= 0");
    require(is_fraction(spec.min_visible_fraction) && spec.min_visible_fraction > 0.5,
            "min_visible_fraction must lie in (0.5, 1]");
    require(is_fraction(spec.straddle_fraction), "straddle_fraction must lie in [0, 1]");

    TiledScenario out;
    try {
        out.grid = build_grid(spec.mosaic_width, spec.mosaic_height, spec.tile_width, spec.tile_height,
                              spec.overlap_x, spec.overlap_y);
    } catch (const DomainError& e) {
        throw DomainError(ErrorCode::InvalidSpec, e.what());
    }
    const TileGrid& grid = out.grid;
    const double mw = spec.mosaic_width;
    const double mh = spec.mosaic_height;
    const double tw = spec.tile_width;
    const double th = spec.tile_height;

    // Tile edges strictly inside the mosaic, used for straddling placement.
    std::vector<double> seams_x;
    std::vector<double> seams_y;
    for (const auto& t : grid.tiles()) {
        if (t.origin_x > 0) seams_x.push_back(t.origin_x);
        if (t.origin_x + tw < mw) seams_x.push_back(t.origin_x + tw);
        if (t.origin_y > 0) seams_y.push_back(t.origin_y);
        if (t.origin_y + th < mh) seams_y.push_back(t.origin_y + th);
    }
    for (auto* seams : {&seams_x, &seams_y}) {
        std::sort(seams->begin(), seams->end());
        seams->erase(std::unique(seams->begin(), seams->end()), seams->end());
    }
    // Boxes kept this far from every tile edge cannot be jittered across it.
    const double edge_margin = 1.0 + 4.0 * spec.jitter_sd;
    auto near_tile_edge = [&](const BoundingBox& b) {
        for (double s : seams_x) {
            if (b.x_min() < s + edge_margin && b.x_max() > s - edge_margin) return true;
        }
        for (double s : seams_y) {
            if (b.y_min() < s + edge_margin && b.y_max() > s - edge_margin) return true;
        }
        return false;
    };

    Rng rng(spec.seed);
    const double gap = 2.0 + 4.0 * spec.jitter_sd;
    int attempts = 0;
    while (static_cast<int>(out.truth.size()) < spec.n_panicles) {
        require(++attempts < 100000, "could not place disjoint panicles; field too crowded");
        const double w = rng.uniform(spec.box_size_min, spec.box_size_max);
        const double h = rng.uniform(spec.box_size_min, spec.box_size_max);
        double cx = rng.uniform(w / 2, mw - w / 2);
        double cy = rng.uniform(h / 2, mh - h / 2);
        if (rng.bernoulli(spec.straddle_fraction) && (!seams_x.empty() || !seams_y.empty())) {
            const bool vertical = seams_y.empty() || (!seams_x.empty() && rng.bernoulli(0.5));
            if (vertical) {
                cx = seams_x[rng.below(seams_x.size())] + rng.uniform(-w / 2, w / 2);
            } else {
                cy = seams_y[rng.below(seams_y.size())] + rng.uniform(-h / 2, h / 2);
            }
            cx = std::clamp(cx, w / 2, mw - w / 2);
            cy = std::clamp(cy, h / 2, mh - h / 2);
        }
        const BoundingBox box(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2);
        if (spec.avoid_seams && near_tile_edge(box)) continue;
        const bool clashes = std::any_of(out.truth.begin(), out.truth.end(), [&](const BoundingBox& o) {
            return box.x_min() < o.x_max() + gap && o.x_min() < box.x_max() + gap &&
                   box.y_min() < o.y_max() + gap && o.y_min() < box.y_max() + gap;
        });
        if (!clashes) out.truth.push_back(box);
    }

    for (const auto& t : grid.tiles()) {
        auto& list = out.per_tile[t.tile_id];
        const double x0 = t.origin_x;
        const double y0 = t.origin_y;
        for (const auto& truth : out.truth) {
            const BoundingBox seen = shifted_inside(truth, rng.normal(0.0, spec.jitter_sd),
                                                    rng.normal(0.0, spec.jitter_sd), mw, mh);
            const double score = rng.uniform(0.5, 1.0);
            const double cx0 = std::max(seen.x_min(), x0);
            const double cy0 = std::max(seen.y_min(), y0);
            const double cx1 = std::min(seen.x_max(), x0 + tw);
            const double cy1 = std::min(seen.y_max(), y0 + th);
            if (cx1 <= cx0 || cy1 <= cy0) continue;
            const double visible = (cx1 - cx0) * (cy1 - cy0) / seen.area();
            if (visible < spec.min_visible_fraction) continue;
            list.emplace_back(BoundingBox(cx0 - x0, cy0 - y0, cx1 - x0, cy1 - y0), score);
        }
    }
    return out;
}

DetectionSet tiles_as_detections(const TiledScenario& scenario) {
    std::vector<ImageRecord> images;
    std::map<std::string, std::vector<ScoredBox>> detections;
    for (const auto& t : scenario.grid.tiles()) {
        const std::string id = std::to_string(t.tile_id);
        images.push_back({id, "tile_" + id + ".png", scenario.grid.tile_width(),
                          scenario.grid.tile_height(), std::nullopt});
        auto it = scenario.per_tile.find(t.tile_id);
        if (it != scenario.per_tile.end()) detections[id] = it->second;
    }
    return DetectionSet(std::move(images), std::move(detections));
}

}  // namespace panicle
