#include "panicle/evaluation.hpp"
#include "panicle/geometry.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <omp.h>

using namespace panicle;

namespace {

GroundTruthSet random_gt(std::mt19937_64& gen, int images, int per_image) {
    std::vector<ImageRecord> records;
    std::map<std::string, std::vector<BoundingBox>> boxes;
    for (int i = 0; i < images; ++i) {
        records.push_back({"im" + std::to_string(i), "im.png", 1100, 1100, std::nullopt});
        const int n = static_cast<int>(gen() % (per_image + 1));
        for (int k = 0; k < n; ++k) boxes[records.back().image_id].push_back(panicle::testing::random_box(gen));
    }
    return GroundTruthSet(records, boxes);
}

DetectionSet jittered(std::mt19937_64& gen, const GroundTruthSet& gt) {
    std::map<std::string, std::vector<ScoredBox>> dets;
    std::normal_distribution<double> shift(0.0, 5.0);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    for (const auto& image : gt.images()) {
        for (const auto& b : gt.boxes_for(image.image_id)) {
            if (gen() % 10 == 0) continue;
            dets[image.image_id].emplace_back(b.translated(shift(gen), shift(gen)), score(gen));
        }
        for (int k = 0; k < 3; ++k) dets[image.image_id].push_back(panicle::testing::random_scored(gen, 1000.0, 100.0));
    }
    return DetectionSet(gt.images(), dets);
}

void check_same(const MatchReport& a, const MatchReport& b) {
    REQUIRE(a.ranked.size() == b.ranked.size());
    for (std::size_t i = 0; i < a.ranked.size(); ++i) {
        CHECK(a.ranked[i].image_id == b.ranked[i].image_id);
        CHECK(a.ranked[i].detection == b.ranked[i].detection);
        CHECK(a.ranked[i].true_positive == b.ranked[i].true_positive);
    }
    CHECK(a.false_negatives == b.false_negatives);
    CHECK(a.tp == b.tp);
    CHECK(a.fp == b.fp);
    CHECK(a.fn == b.fn);
    CHECK(a.total_ground_truth == b.total_ground_truth);
}

}  // namespace

TEST_CASE("parallel nms equals the serial reference") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<ScoredBox> boxes;
        const int n = 1 + static_cast<int>(gen() % 2000);
        for (int i = 0; i < n; ++i) boxes.push_back(panicle::testing::random_scored(gen, 800.0, 80.0));
        for (double tau : {0.3, 0.5, 0.7}) CHECK(nms(boxes, tau) == reference::nms(boxes, tau));
    }
}

TEST_CASE("parallel match and count equal the serial reference") {
    for (int threads : {1, 2, 4}) {
        omp_set_num_threads(threads);
        std::mt19937_64 gen(31);
        for (int trial = 0; trial < 10; ++trial) {
            const auto gt = random_gt(gen, 1 + static_cast<int>(gen() % 40), 60);
            const auto det = jittered(gen, gt);
            for (double tau : {0.5, 0.75}) check_same(match(gt, det, tau, 0.1), reference::match(gt, det, tau, 0.1));
            CHECK(count_detections(det, 0.25, 500.0) == reference::count_detections(det, 0.25, 500.0));
        }
    }
}
