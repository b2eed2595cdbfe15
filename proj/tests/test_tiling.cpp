#include "panicle/errors.hpp"
#include "panicle/synth.hpp"
#include "panicle/tiling.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace panicle;

namespace {

std::vector<std::pair<int, int>> origins(const TileGrid& grid) {
    std::vector<std::pair<int, int>> out;
    for (const auto& t : grid.tiles()) out.emplace_back(t.origin_x, t.origin_y);
    return out;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const DomainError& e) {
        return e.code();
    }
    FAIL("expected DomainError");
    return ErrorCode::InvalidSpec;
}

}  // namespace

TEST_CASE("grid worked examples") {
    const auto halves = build_grid(800, 600, 800, 300);
    CHECK(origins(halves) == std::vector<std::pair<int, int>>{{0, 0}, {0, 300}});
    CHECK(halves.manifest_csv() ==
          "tile_id,origin_x,origin_y,width,height\n0,0,0,800,300\n1,0,300,800,300\n");

    CHECK(origins(build_grid(640, 480, 640, 480)) == std::vector<std::pair<int, int>>{{0, 0}});

    // stride 488; ceil(976 / 488) = 2 per axis; last origin min(488, 1000 - 512) = 488.
    const auto g = build_grid(1000, 1000, 512, 512, 24, 24);
    CHECK(origins(g) == std::vector<std::pair<int, int>>{{0, 0}, {488, 0}, {0, 488}, {488, 488}});

    // Clamped edge tile: stride 300 over 1000 -> origins 0, 300, 600 then clamp 600 (1000 - 400).
    const auto clamp = build_grid(1000, 400, 400, 400);
    CHECK(origins(clamp) == std::vector<std::pair<int, int>>{{0, 0}, {400, 0}, {600, 0}});
}

TEST_CASE("grid geometry errors") {
    CHECK(code_of([] { build_grid(100, 100, 200, 50); }) == ErrorCode::InvalidGeometry);
    CHECK(code_of([] { build_grid(100, 100, 50, 50, 50, 0); }) == ErrorCode::InvalidGeometry);
    CHECK(code_of([] { build_grid(100, 100, 50, 50, -1, 0); }) == ErrorCode::InvalidGeometry);
    CHECK(code_of([] { build_grid(0, 100, 50, 50); }) == ErrorCode::InvalidGeometry);
}

TEST_CASE("grid covers every pixel and matches the tile-count formula") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int mw = 20 + static_cast<int>(gen() % 300);
        const int mh = 20 + static_cast<int>(gen() % 300);
        const int tw = 1 + static_cast<int>(gen() % mw);
        const int th = 1 + static_cast<int>(gen() % mh);
        const int ox = static_cast<int>(gen() % tw);
        const int oy = static_cast<int>(gen() % th);
        const auto grid = build_grid(mw, mh, tw, th, ox, oy);
        const int nx = (mw - ox + (tw - ox) - 1) / (tw - ox);
        const int ny = (mh - oy + (th - oy) - 1) / (th - oy);
        REQUIRE(static_cast<int>(grid.tiles().size()) == nx * ny);
        std::vector<char> covered(static_cast<std::size_t>(mw * mh), 0);
        for (const auto& t : grid.tiles()) {
            REQUIRE(t.origin_x >= 0);
            REQUIRE(t.origin_x + tw <= mw);
            REQUIRE(t.origin_y + th <= mh);
            for (int y = t.origin_y; y < t.origin_y + th; ++y) {
                for (int x = t.origin_x; x < t.origin_x + tw; ++x) covered[static_cast<std::size_t>(y * mw + x)] = 1;
            }
        }
        CHECK(std::all_of(covered.begin(), covered.end(), [](char c) { return c == 1; }));
    }
}

TEST_CASE("to_global and to_local") {
    const auto grid = build_grid(2000, 800, 1000, 400);
    const ScoredBox local(BoundingBox(10, 20, 50, 60), 0.7);
    CHECK(to_global(grid, 0, local) == local);
    const ScoredBox global = to_global(grid, 3, local);
    CHECK(global == ScoredBox(BoundingBox(1010, 420, 1050, 460), 0.7));
    CHECK(to_local(grid, 3, global) == local);

    CHECK(code_of([&] { to_global(grid, 4, local); }) == ErrorCode::UnknownTile);
    CHECK(code_of([&] { to_global(grid, -1, local); }) == ErrorCode::UnknownTile);
    CHECK(code_of([&] { to_global(grid, 0, ScoredBox(BoundingBox(990, 0, 1001, 10), 0.5)); }) ==
          ErrorCode::OutOfTileBounds);
    CHECK(code_of([&] { to_local(grid, 0, global); }) == ErrorCode::OutOfTileBounds);
}

TEST_CASE("merge examples") {
    const auto single = build_grid(500, 500, 500, 500);
    const std::vector<ScoredBox> boxes{{BoundingBox(0, 0, 10, 10), 0.9}, {BoundingBox(2, 2, 12, 12), 0.8}};
    CHECK(merge_tiles(single, {{0, boxes}}, 1.0) == boxes);

    // Same panicle seen by two overlapping tiles.
    const auto pair = build_grid(1000, 500, 600, 500, 200, 0);
    const ScoredBox in_left(BoundingBox(450, 100, 490, 140), 0.8);
    const ScoredBox in_right(BoundingBox(51, 101, 91, 141), 0.9);  // origin 400 -> (451, 101, ...)
    REQUIRE(iou(to_global(pair, 0, in_left).box(), to_global(pair, 1, in_right).box()) > 0.9);
    const auto merged = merge_tiles(pair, {{0, {in_left}}, {1, {in_right}}}, 0.5);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].score() == 0.9);
}

TEST_CASE("merge of disjoint panicles over a 2x2 overlapping grid recovers the count") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        TiledScenarioSpec spec;
        spec.seed = seed;
        spec.straddle_fraction = 0.5;
        const auto s = generate_tiled(spec);
        REQUIRE(s.grid.tiles().size() == 4);
        CHECK(merge_tiles(s.grid, s.per_tile, 0.5).size() == 10);
    }
}

TEST_CASE("merge is invariant to tile enumeration order") {
    TiledScenarioSpec spec;
    spec.n_panicles = 40;
    spec.straddle_fraction = 0.8;
    spec.seed = 77;
    const auto s = generate_tiled(spec);
    const auto reference = merge_tiles(s.grid, s.per_tile, 0.5);

    // Renumber nothing, but feed each tile's boxes in shuffled order and
    // rebuild the map from a shuffled key sequence.
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> keys;
        for (const auto& [k, v] : s.per_tile) keys.push_back(k);
        std::shuffle(keys.begin(), keys.end(), gen);
        std::map<int, std::vector<ScoredBox>> shuffled;
        for (int k : keys) {
            auto list = s.per_tile.at(k);
            std::shuffle(list.begin(), list.end(), gen);
            shuffled[k] = list;
        }
        CHECK(merge_tiles(s.grid, shuffled, 0.5) == reference);
    }
}
