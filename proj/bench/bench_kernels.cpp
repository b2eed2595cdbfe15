#include "panicle/evaluation.hpp"
#include "panicle/geometry.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace panicle;

namespace {

std::vector<ScoredBox> random_boxes(std::size_t n, double extent, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> pos(0.0, extent);
    std::uniform_real_distribution<double> side(10.0, 60.0);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::vector<ScoredBox> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = pos(gen), y = pos(gen);
        out.emplace_back(BoundingBox(x, y, x + side(gen), y + side(gen)), score(gen));
    }
    return out;
}

struct Dataset {
    GroundTruthSet gt;
    DetectionSet det;
};

Dataset random_dataset(int images, std::size_t per_image) {
    std::vector<ImageRecord> records;
    std::map<std::string, std::vector<BoundingBox>> truth;
    std::map<std::string, std::vector<ScoredBox>> dets;
    for (int i = 0; i < images; ++i) {
        const std::string id = "im" + std::to_string(i);
        records.push_back({id, id + ".png", 2000, 2000, std::nullopt});
        auto boxes = random_boxes(per_image, 1900.0, static_cast<std::uint64_t>(i));
        for (const auto& b : boxes) truth[id].push_back(b.box());
        for (const auto& b : boxes) dets[id].emplace_back(b.box().translated(2.0, -1.5), b.score());
        auto noise = random_boxes(per_image / 4, 1900.0, 1000u + static_cast<std::uint64_t>(i));
        dets[id].insert(dets[id].end(), noise.begin(), noise.end());
    }
    return {GroundTruthSet(records, truth), DetectionSet(records, dets)};
}

void BM_nms(benchmark::State& state) {
    const auto boxes = random_boxes(static_cast<std::size_t>(state.range(0)), 3000.0, 7);
    for (auto _ : state) benchmark::DoNotOptimize(nms(boxes, 0.5));
}

void BM_nms_reference(benchmark::State& state) {
    const auto boxes = random_boxes(static_cast<std::size_t>(state.range(0)), 3000.0, 7);
    for (auto _ : state) benchmark::DoNotOptimize(reference::nms(boxes, 0.5));
}

void BM_match(benchmark::State& state) {
    const auto data = random_dataset(static_cast<int>(state.range(0)), 300);
    for (auto _ : state) benchmark::DoNotOptimize(match(data.gt, data.det, 0.5, 0.0));
}

void BM_match_reference(benchmark::State& state) {
    const auto data = random_dataset(static_cast<int>(state.range(0)), 300);
    for (auto _ : state) benchmark::DoNotOptimize(reference::match(data.gt, data.det, 0.5, 0.0));
}

void BM_count(benchmark::State& state) {
    const auto data = random_dataset(static_cast<int>(state.range(0)), 2000);
    for (auto _ : state) benchmark::DoNotOptimize(count_detections(data.det, 0.25, 400.0));
}

void BM_count_reference(benchmark::State& state) {
    const auto data = random_dataset(static_cast<int>(state.range(0)), 2000);
    for (auto _ : state) benchmark::DoNotOptimize(reference::count_detections(data.det, 0.25, 400.0));
}

}  // namespace

BENCHMARK(BM_nms)->Arg(1000)->Arg(5000);
BENCHMARK(BM_nms_reference)->Arg(1000)->Arg(5000);
BENCHMARK(BM_match)->Arg(8)->Arg(32);
BENCHMARK(BM_match_reference)->Arg(8)->Arg(32);
BENCHMARK(BM_count)->Arg(8)->Arg(32);
BENCHMARK(BM_count_reference)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
