#include "panicle/errors.hpp"
#include "panicle/geometry.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace panicle;
using panicle::testing::random_box;
using panicle::testing::random_scored;

TEST_CASE("boxes reject zero-area, inverted and non-finite corners") {
    CHECK_THROWS_AS(BoundingBox(0, 0, 0, 10), ValidationError);
    CHECK_THROWS_AS(BoundingBox(0, 0, 10, 0), ValidationError);
    CHECK_THROWS_AS(BoundingBox(10, 0, 0, 10), ValidationError);
    CHECK_THROWS_AS(BoundingBox(0, 0, std::numeric_limits<double>::infinity(), 10), ValidationError);
    CHECK_THROWS_AS(BoundingBox(std::nan(""), 0, 1, 1), ValidationError);
    CHECK_THROWS_AS(BoundingBox::from_xywh(0, 0, -1, 5), ValidationError);
    CHECK_THROWS_AS(ScoredBox(BoundingBox(0, 0, 1, 1), 1.5), ValidationError);
    CHECK_THROWS_AS(ScoredBox(BoundingBox(0, 0, 1, 1), -0.01), ValidationError);

    const auto b = BoundingBox::from_xywh(10, 20, 40, 30);
    CHECK(b == BoundingBox(10, 20, 50, 50));
    CHECK(b.area() == 1200.0);
}

TEST_CASE("iou worked examples") {
    const BoundingBox a(0, 0, 10, 10);
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, BoundingBox(20, 20, 30, 30)) == 0.0);
    // Intersection 5 x 5 = 25, union 100 + 100 - 25 = 175.
    CHECK(iou(a, BoundingBox(5, 5, 15, 15)) == doctest::Approx(25.0 / 175.0).epsilon(1e-15));
    // Touching edges share no interior.
    CHECK(iou(a, BoundingBox(10, 0, 20, 10)) == 0.0);
}

TEST_CASE("iou properties on random boxes") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> shift(-500.0, 500.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int trial = 0; trial < 5000; ++trial) {
        const auto a = random_box(gen, 200.0, 80.0);
        const auto b = random_box(gen, 200.0, 80.0);
        const double v = iou(a, b);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        REQUIRE(v == iou(b, a));
        REQUIRE(iou(a, a) == 1.0);

        const double dx = shift(gen);
        const double dy = shift(gen);
        CHECK(iou(a.translated(dx, dy), b.translated(dx, dy)) == doctest::Approx(v).epsilon(1e-9));
        const double s = scale(gen);
        const double scaled = iou(a.scaled(s), b.scaled(s));
        CHECK(std::abs(scaled - v) <= 1e-12 * std::max(1.0, v));
    }
}

TEST_CASE("nms worked examples") {
    CHECK(nms({}, 0.5).empty());

    const BoundingBox same(0, 0, 10, 10);
    const std::vector<ScoredBox> dup{{same, 0.8}, {same, 0.9}};
    const auto kept = nms(dup, 0.5);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].score() == 0.9);

    // iou(A, B) = 81 / 119 > 0.5; C is disjoint from both.
    const ScoredBox a(BoundingBox(0, 0, 10, 10), 0.9);
    const ScoredBox b(BoundingBox(1, 1, 11, 11), 0.8);
    const ScoredBox c(BoundingBox(50, 50, 60, 60), 0.7);
    CHECK(iou(a.box(), b.box()) == doctest::Approx(81.0 / 119.0));
    const std::vector<ScoredBox> input{c, b, a};
    CHECK(nms(input, 0.5) == std::vector<ScoredBox>{a, c});
}

TEST_CASE("nms ties in score break by x_min then y_min") {
    const ScoredBox left(BoundingBox(0, 5, 10, 15), 0.5);
    const ScoredBox right(BoundingBox(2, 0, 12, 10), 0.5);
    const ScoredBox low(BoundingBox(0, 6, 10, 16), 0.5);
    std::vector<ScoredBox> input{right, low, left};
    const auto kept = nms(input, 1.0);
    CHECK(kept == std::vector<ScoredBox>{left, low, right});
    std::reverse(input.begin(), input.end());
    CHECK(nms(input, 1.0) == kept);
}

TEST_CASE("nms properties") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> thr(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<ScoredBox> boxes;
        const int n = static_cast<int>(gen() % 40);
        for (int i = 0; i < n; ++i) boxes.push_back(random_scored(gen));
        const double tau = thr(gen);
        const auto kept = nms(boxes, tau);

        // Subset, rank ordered, pairwise below threshold.
        for (const auto& k : kept) CHECK(std::find(boxes.begin(), boxes.end(), k) != boxes.end());
        CHECK(std::is_sorted(kept.begin(), kept.end(), ranks_before));
        for (std::size_t i = 0; i < kept.size(); ++i) {
            for (std::size_t j = i + 1; j < kept.size(); ++j) CHECK(iou(kept[i].box(), kept[j].box()) <= tau);
        }
        // Top-ranked box always survives.
        if (!boxes.empty()) {
            CHECK(kept.front() == *std::min_element(boxes.begin(), boxes.end(), ranks_before));
        }
        CHECK(nms(kept, tau) == kept);

        auto sorted = boxes;
        std::stable_sort(sorted.begin(), sorted.end(), ranks_before);
        CHECK(nms(boxes, 1.0) == sorted);
    }
}
