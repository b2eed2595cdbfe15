#pragma once

#include "panicle/dataset.hpp"
#include "panicle/tiling.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace panicle {

/// Multi-date field scenario. Defaults mirror a moderately noisy detector on a
/// 3000 x 1200 plot crop flown at 65, 68, 70, 76, 79 and 83 days after
/// planting.
struct ScenarioSpec {
    int n_plants = 280;
    int field_width = 3000;
    int field_height = 1200;
    double emergence_midpoint = 68.5;
    double emergence_rate = 0.55;
    std::vector<int> dates{65, 68, 70, 76, 79, 83};
    double box_size_mean = 40.0;
    double box_size_sd = 8.0;
    double jitter_sd = 2.0;
    double duplicate_rate = 0.05;
    double miss_rate = 0.05;
    double score_noise_sd = 0.1;
    std::uint64_t seed = 1;

    /// All noise off: detections reproduce the ground truth at score 1.
    ScenarioSpec noiseless() const;
};

struct Scenario {
    std::map<int, GroundTruthSet> ground_truth;  ///< keyed by day
    std::map<int, DetectionSet> detections;      ///< keyed by day
    CountSeries true_counts;
    /// Median of the logistic emergence schedule.
    double true_flowering_day = 0.0;
};

/// Throws DomainError(InvalidSpec).
void validate(const ScenarioSpec& spec);

/// Plants sit one per cell of a regular grid over the field, so ground-truth
/// boxes never overlap. Plant i emerges on day
/// midpoint + ln(u / (1 - u)) / rate and stays visible afterwards. Each date
/// yields one image holding every emerged plant; detections drop a plant with
/// probability miss_rate, jitter its centre by N(0, jitter_sd), score it
/// 1 - |N(0, score_noise_sd)|, and add a second jittered copy with
/// probability duplicate_rate. Draw order is fixed, so outputs depend only on
/// the spec.
Scenario generate(const ScenarioSpec& spec);

/// Single-mosaic scenario for exercising tile merging.
struct TiledScenarioSpec {
    int mosaic_width = 1000;
    int mosaic_height = 1000;
    int tile_width = 532;
    int tile_height = 532;
    int overlap_x = 64;
    int overlap_y = 64;
    int n_panicles = 10;
    double box_size_min = 20.0;
    double box_size_max = 40.0;
    double jitter_sd = 1.0;
    /// Tiles report a clipped panicle when at least this fraction is visible.
    double min_visible_fraction = 0.8;
    /// Probability that a panicle is centred on a seam between tiles.
    double straddle_fraction = 0.0;
    /// Place panicles strictly inside single tiles (no box crosses a tile edge).
    bool avoid_seams = false;
    std::uint64_t seed = 1;
};

struct TiledScenario {
    TileGrid grid;
    std::map<int, std::vector<ScoredBox>> per_tile;  ///< tile-local detections
    std::vector<BoundingBox> truth;                  ///< mosaic coordinates
};

TiledScenario generate_tiled(const TiledScenarioSpec& spec);

/// Per-tile detections as a DetectionSet whose image ids are the tile ids.
DetectionSet tiles_as_detections(const TiledScenario& scenario);

}  // namespace panicle
