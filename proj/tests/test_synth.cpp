#include "panicle/dataset_io.hpp"
#include "panicle/errors.hpp"
#include "panicle/report.hpp"
#include "panicle/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace panicle;

namespace {

void check_invalid(const ScenarioSpec& spec) {
    try {
        generate(spec);
        FAIL("expected InvalidSpec");
    } catch (const DomainError& e) {
        CHECK(e.code() == ErrorCode::InvalidSpec);
    }
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
    ScenarioSpec spec;
    const auto a = generate(spec);
    const auto b = generate(spec);
    for (int day : spec.dates) {
        CHECK(to_json(a.detections.at(day)) == to_json(b.detections.at(day)));
        CHECK(to_json(a.ground_truth.at(day)) == to_json(b.ground_truth.at(day)));
    }
    spec.seed = 2;
    const auto c = generate(spec);
    CHECK(to_json(a.detections.at(83)) != to_json(c.detections.at(83)));
}

TEST_CASE("noiseless detections reproduce the ground truth") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ScenarioSpec spec;
        spec.seed = seed;
        const auto s = generate(spec.noiseless());
        for (int day : spec.dates) {
            const auto& gt = s.ground_truth.at(day);
            const auto& det = s.detections.at(day);
            const auto summary = evaluate(gt, det);
            CHECK(summary.ap == 1.0);
            CHECK(summary.counts.mae == 0.0);
            CHECK(summary.counts.rmse == 0.0);
            CHECK(summary.fp == 0);
            CHECK(summary.fn == 0);
        }
        CHECK(build_series(s.detections, 0.25, 0.0).observations() == s.true_counts.observations());
    }
}

TEST_CASE("true counts never decrease and ground truth never overlaps") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ScenarioSpec spec;
        spec.seed = seed;
        const auto s = generate(spec);
        const auto& obs = s.true_counts.observations();
        for (std::size_t i = 1; i < obs.size(); ++i) CHECK(obs[i].count >= obs[i - 1].count);
        const auto& boxes = s.ground_truth.at(83).boxes_for("d083");
        CHECK(static_cast<int>(boxes.size()) <= spec.n_plants);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            for (std::size_t j = i + 1; j < boxes.size(); ++j) REQUIRE(intersection_area(boxes[i], boxes[j]) == 0.0);
        }
    }
}

TEST_CASE("flowering truth follows the emergence midpoint") {
    ScenarioSpec spec;
    spec.n_plants = 100;
    spec.emergence_midpoint = 70.0;
    const auto s = generate(spec);
    CHECK(s.true_flowering_day == 70.0);

    const auto series = build_series(s.detections, 0.25, 0.0);
    const auto est = flowering_time(series, fit_cubic(series));
    CHECK(std::abs(est.flowering_day - s.true_flowering_day) <= 1.5);
}

TEST_CASE("invalid specs") {
    ScenarioSpec spec;
    spec.miss_rate = 1.5;
    check_invalid(spec);
    spec = {};
    spec.dates = {70, 65};
    check_invalid(spec);
    spec = {};
    spec.emergence_rate = 0.0;
    check_invalid(spec);
    spec = {};
    spec.n_plants = -1;
    check_invalid(spec);
    spec = {};
    spec.field_width = 0;
    check_invalid(spec);
}

TEST_CASE("no plants gives an all-zero series") {
    ScenarioSpec spec;
    spec.n_plants = 0;
    const auto s = generate(spec);
    const auto series = build_series(s.detections, 0.25, 0.0);
    try {
        flowering_time(series, fit_cubic(series));
        FAIL("expected AllZero");
    } catch (const DomainError& e) {
        CHECK(e.code() == ErrorCode::AllZero);
    }
}

TEST_CASE("tiled scenario") {
    TiledScenarioSpec spec;
    const auto s = generate_tiled(spec);
    CHECK(s.grid.tiles().size() == 4);
    CHECK(s.truth.size() == 10);
    for (const auto& [id, dets] : s.per_tile) {
        for (const auto& d : dets) {
            CHECK(d.box().within(0, 0, spec.tile_width, spec.tile_height));
        }
    }
    const auto det = tiles_as_detections(s);
    CHECK(det.images().size() == 4);
    CHECK(det.images()[0].image_id == "0");

    spec.min_visible_fraction = 0.3;
    CHECK_THROWS_AS(generate_tiled(spec), DomainError);
}
