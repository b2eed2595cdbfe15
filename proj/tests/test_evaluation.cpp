#include "panicle/errors.hpp"
#include "panicle/evaluation.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

using namespace panicle;

namespace {

ImageRecord image(const std::string& id) { return {id, id + ".png", 200, 200, std::nullopt}; }

GroundTruthSet one_image_gt(std::vector<BoundingBox> boxes) {
    return GroundTruthSet({image("a")}, {{"a", std::move(boxes)}});
}

DetectionSet one_image_det(std::vector<ScoredBox> dets) {
    return DetectionSet({image("a")}, {{"a", std::move(dets)}});
}

/// Largest one-to-one assignment with IoU >= tau, by exhaustive search.
std::size_t max_matching(const std::vector<BoundingBox>& truth, const std::vector<ScoredBox>& dets,
                         double tau, std::size_t d = 0, std::uint32_t used = 0) {
    if (d == dets.size()) return 0;
    std::size_t best = max_matching(truth, dets, tau, d + 1, used);
    for (std::size_t g = 0; g < truth.size(); ++g) {
        if (used & (1u << g)) continue;
        if (iou(dets[d].box(), truth[g]) < tau) continue;
        best = std::max(best, 1 + max_matching(truth, dets, tau, d + 1, used | (1u << g)));
    }
    return best;
}

}  // namespace

TEST_CASE("perfect detections") {
    const std::vector<BoundingBox> truth{{0, 0, 10, 10}, {20, 20, 40, 40}, {50, 0, 60, 30}};
    std::vector<ScoredBox> dets;
    for (const auto& b : truth) dets.emplace_back(b, 1.0);
    const auto r = match(one_image_gt(truth), one_image_det(dets));
    CHECK(r.tp == 3);
    CHECK(r.fp == 0);
    CHECK(r.fn == 0);
    CHECK(average_precision(pr_curve(r)) == 1.0);
}

TEST_CASE("a ground-truth box is matched at most once") {
    const BoundingBox g(0, 0, 10, 10);
    const auto r = match(one_image_gt({g}), one_image_det({{g, 0.8}, {g, 0.9}}));
    REQUIRE(r.ranked.size() == 2);
    CHECK(r.ranked[0].detection.score() == 0.9);
    CHECK(r.flags() == std::vector<bool>{true, false});
    CHECK(r.tp == 1);
    CHECK(r.fp == 1);
}

TEST_CASE("greedy matching worked example") {
    const BoundingBox gt1(0, 0, 10, 10);
    const BoundingBox gt2(100, 0, 110, 10);
    const ScoredBox d1(BoundingBox(0, 0, 10, 6), 0.9);     // iou 0.6 with gt1
    const ScoredBox d2(BoundingBox(100, 0, 110, 2), 0.8);  // iou 0.2 with gt2
    const ScoredBox d3(BoundingBox(100, 0, 110, 7), 0.7);  // iou 0.7 with gt2
    CHECK(iou(d1.box(), gt1) == doctest::Approx(0.6));
    CHECK(iou(d2.box(), gt2) == doctest::Approx(0.2));
    CHECK(iou(d3.box(), gt2) == doctest::Approx(0.7));
    const auto r = match(one_image_gt({gt1, gt2}), one_image_det({d3, d1, d2}), 0.5);
    CHECK(r.flags() == std::vector<bool>{true, false, true});
    CHECK(r.fn == 0);

    const auto curve = pr_curve(r);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].recall == 0.5);
    CHECK(curve[0].precision == 1.0);
    CHECK(curve[1].recall == 0.5);
    CHECK(curve[1].precision == 0.5);
    CHECK(curve[2].recall == 1.0);
    CHECK(curve[2].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    // 0.5 * 1 + 0 * 0.5 + 0.5 * 2/3
    CHECK(average_precision(curve) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    // Interpolation lifts P_2 to 2/3, which carries zero recall weight.
    CHECK(average_precision(curve, ApMode::Interpolated) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("score floor removes detections before matching") {
    const BoundingBox g(0, 0, 10, 10);
    const auto r = match(one_image_gt({g}), one_image_det({{g, 0.2}, {BoundingBox(50, 50, 60, 60), 0.9}}), 0.5, 0.25);
    CHECK(r.ranked.size() == 1);
    CHECK(r.tp == 0);
    CHECK(r.fp == 1);
    CHECK(r.fn == 1);
}

TEST_CASE("match rejects detections on unknown images") {
    const DetectionSet det({image("zzz")}, {});
    try {
        match(one_image_gt({}), det);
        FAIL("expected ImageMismatch");
    } catch (const DomainError& e) {
        CHECK(e.code() == ErrorCode::ImageMismatch);
    }
}

TEST_CASE("pr curve examples") {
    auto c = pr_curve(std::vector<bool>{true}, 1);
    REQUIRE(c.size() == 1);
    CHECK(c[0].recall == 1.0);
    CHECK(c[0].precision == 1.0);
    CHECK(average_precision(c) == 1.0);

    c = pr_curve(std::vector<bool>{false, false}, 3);
    CHECK(c[0].recall == 0.0);
    CHECK(c[1].precision == 0.0);
    CHECK(average_precision(c) == 0.0);
    CHECK(average_precision({}) == 0.0);

    CHECK_THROWS_AS(pr_curve(std::vector<bool>{true}, 0), DomainError);
}

TEST_CASE("interpolated AP replaces precision with its right maximum") {
    // Flags F T T over 2 GT: P = 0, 1/2, 2/3; R = 0, 1/2, 1.
    const auto c = pr_curve(std::vector<bool>{false, true, true}, 2);
    CHECK(average_precision(c) == doctest::Approx(0.5 * 0.5 + 0.5 * 2.0 / 3.0));
    CHECK(average_precision(c, ApMode::Interpolated) == doctest::Approx(0.5 * 2.0 / 3.0 + 0.5 * 2.0 / 3.0));
}

TEST_CASE("count errors") {
    auto e = count_errors(std::vector<CountPair>{{10, 10}, {20, 20}});
    CHECK(e.mape == 0.0);
    CHECK(e.mae == 0.0);
    CHECK(e.rmse == 0.0);

    // e = -2, 5, 0
    e = count_errors(std::vector<CountPair>{{10, 8}, {20, 25}, {30, 30}});
    CHECK(e.mape == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(e.mae == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
    CHECK(e.rmse == doctest::Approx(std::sqrt(29.0 / 3.0)).epsilon(1e-15));
    CHECK(e.errors == std::vector<double>{-2, 5, 0});

    e = count_errors(std::vector<CountPair>{{100, 90}});
    CHECK(e.mape == doctest::Approx(0.1));
    CHECK(e.mae == 10.0);
    CHECK(e.rmse == 10.0);

    try {
        count_errors(std::vector<CountPair>{{10, 9}, {0, 3}});
        FAIL("expected ZeroGroundTruthCount");
    } catch (const DomainError& err) {
        CHECK(err.code() == ErrorCode::ZeroGroundTruthCount);
    }
    CHECK_THROWS_AS(count_errors(std::vector<CountPair>{}), DomainError);
}

TEST_CASE("mae never exceeds rmse") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> truth(1, 500);
    std::uniform_int_distribution<int> noise(-60, 60);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<CountPair> pairs;
        const int n = 1 + static_cast<int>(gen() % 20);
        for (int i = 0; i < n; ++i) {
            const int c = truth(gen);
            pairs.push_back({c, std::max(0, c + noise(gen))});
        }
        const auto e = count_errors(pairs);
        REQUIRE(e.mae <= e.rmse * (1 + 1e-15));
        REQUIRE(e.mape >= 0.0);
    }
}

TEST_CASE("count_detections filters by score and area") {
    const DetectionSet raw({image("a"), image("b")},
                           {{"a", {{BoundingBox(0, 0, 10, 10), 0.1}, {BoundingBox(0, 0, 20, 20), 0.5},
                                   {BoundingBox(0, 0, 30, 30), 0.9}}}});
    CHECK(count_detections(raw, 0, 0) == std::map<std::string, std::int64_t>{{"a", 3}, {"b", 0}});
    // Areas 100, 400, 900; the min_area boundary is inclusive.
    CHECK(count_detections(raw, 0, 400).at("a") == 2);
    CHECK(count_detections(raw, 0.5, 0).at("a") == 2);
    CHECK(count_detections(raw, 0.5, 900).at("a") == 1);

    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> floor_dist(0.0, 1.0);
    std::uniform_real_distribution<double> area_dist(0.0, 3000.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ScoredBox> dets;
        for (int i = 0; i < 30; ++i) dets.push_back(panicle::testing::random_scored(gen));
        const double sf = floor_dist(gen);
        const double ma = area_dist(gen);
        std::int64_t brute = 0;
        for (const auto& d : dets) brute += (d.score() >= sf && d.box().area() >= ma) ? 1 : 0;
        CHECK(count_detections(one_image_det(dets), sf, ma).at("a") == brute);
    }
}

TEST_CASE("randomized matching against exhaustive search") {
    std::mt19937_64 gen(1234);
    std::size_t suboptimal = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        std::vector<BoundingBox> truth;
        std::vector<ScoredBox> dets;
        const int n_gt = static_cast<int>(gen() % 7);
        const int n_det = static_cast<int>(gen() % 7);
        for (int i = 0; i < n_gt; ++i) truth.push_back(panicle::testing::random_box(gen, 40.0, 30.0));
        for (int i = 0; i < n_det; ++i) dets.push_back(panicle::testing::random_scored(gen, 40.0, 30.0));
        const auto r = match(one_image_gt(truth), one_image_det(dets), 0.5);

        REQUIRE(r.tp + r.fn == truth.size());
        REQUIRE(r.tp + r.fp == dets.size());
        // One-to-one: each TP can be paired with a distinct GT box.
        const std::size_t best = max_matching(truth, dets, 0.5);
        REQUIRE(r.tp <= best);
        if (r.tp < best) ++suboptimal;

        // Permuting the input leaves the totals unchanged.
        auto shuffled = dets;
        std::shuffle(shuffled.begin(), shuffled.end(), gen);
        const auto p = match(one_image_gt(truth), one_image_det(shuffled), 0.5);
        CHECK(p.tp == r.tp);
        CHECK(p.flags() == r.flags());

        // Strictly monotone rescaling of scores leaves AP unchanged.
        if (!truth.empty()) {
            std::vector<ScoredBox> rescaled;
            for (const auto& d : dets) rescaled.emplace_back(d.box(), d.score() * d.score() * 0.5);
            const auto q = match(one_image_gt(truth), one_image_det(rescaled), 0.5);
            const double ap = average_precision(pr_curve(r));
            CHECK(average_precision(pr_curve(q)) == ap);
            CHECK(ap >= 0.0);
            CHECK(ap <= 1.0);
        }
    }
    // Greedy score-ordered matching is not a maximum matching in general.
    MESSAGE("greedy below exhaustive optimum in " << suboptimal << " of 3000 instances");
}
