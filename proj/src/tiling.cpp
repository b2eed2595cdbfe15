#include "panicle/tiling.hpp"

#include "panicle/errors.hpp"

#include <algorithm>

namespace panicle {

namespace {

std::vector<int> axis_origins(int mosaic, int tile, int overlap) {
    const int stride = tile - overlap;
    const int count = (mosaic - overlap + stride - 1) / stride;
    std::vector<int> origins;
    origins.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) origins.push_back(std::min(k * stride, mosaic - tile));
    return origins;
}

}  // namespace

const Tile& TileGrid::tile(int tile_id) const {
    if (tile_id < 0 || tile_id >= static_cast<int>(tiles_.size())) {
        throw DomainError(ErrorCode::UnknownTile, "no tile with id " + std::to_string(tile_id));
    }
    return tiles_[static_cast<std::size_t>(tile_id)];
}

std::string TileGrid::manifest_csv() const {
    std::string out = "tile_id,origin_x,origin_y,width,height\n";
    for (const auto& t : tiles_) {
        out += std::to_string(t.tile_id) + ',' + std::to_string(t.origin_x) + ',' +
               std::to_string(t.origin_y) + ',' + std::to_string(tile_width_) + ',' +
               std::to_string(tile_height_) + '\n';
    }
    return out;
}

TileGrid build_grid(int mosaic_w, int mosaic_h, int tile_w, int tile_h, int overlap_x,
                    int overlap_y) {
    if (mosaic_w <= 0 || mosaic_h <= 0 || tile_w <= 0 || tile_h <= 0) {
        throw DomainError(ErrorCode::InvalidGeometry, "mosaic and tile sizes must be positive");
    }
    if (tile_w > mosaic_w || tile_h > mosaic_h) {
        throw DomainError(ErrorCode::InvalidGeometry, "tile larger than mosaic");
    }
    if (overlap_x < 0 || overlap_y < 0 || overlap_x >= tile_w || overlap_y >= tile_h) {
        throw DomainError(ErrorCode::InvalidGeometry, "overlap must lie in [0, tile size)");
    }
    TileGrid grid;
    grid.mosaic_width_ = mosaic_w;
    grid.mosaic_height_ = mosaic_h;
    grid.tile_width_ = tile_w;
    grid.tile_height_ = tile_h;
    grid.overlap_x_ = overlap_x;
    grid.overlap_y_ = overlap_y;
    const auto xs = axis_origins(mosaic_w, tile_w, overlap_x);
    const auto ys = axis_origins(mosaic_h, tile_h, overlap_y);
    grid.columns_ = static_cast<int>(xs.size());
    grid.rows_ = static_cast<int>(ys.size());
    int id = 0;
    for (int y : ys) {
        for (int x : xs) grid.tiles_.push_back({id++, x, y});
    }
    return grid;
}

ScoredBox to_global(const TileGrid& grid, int tile_id, const ScoredBox& local) {
    const Tile& t = grid.tile(tile_id);
    if (!local.box().within(0.0, 0.0, grid.tile_width(), grid.tile_height())) {
        throw DomainError(ErrorCode::OutOfTileBounds,
                          "box outside the bounds of tile " + std::to_string(tile_id));
    }
    return ScoredBox(local.box().translated(t.origin_x, t.origin_y), local.score());
}

ScoredBox to_local(const TileGrid& grid, int tile_id, const ScoredBox& global) {
    const Tile& t = grid.tile(tile_id);
    const double x0 = t.origin_x;
    const double y0 = t.origin_y;
    if (!global.box().within(x0, y0, x0 + grid.tile_width(), y0 + grid.tile_height())) {
        throw DomainError(ErrorCode::OutOfTileBounds,
                          "box outside the mosaic region of tile " + std::to_string(tile_id));
    }
    return ScoredBox(global.box().translated(-x0, -y0), global.score());
}

std::vector<ScoredBox> merge_tiles(const TileGrid& grid,
                                   const std::map<int, std::vector<ScoredBox>>& per_tile,
                                   double seam_iou) {
    std::vector<ScoredBox> global;
    for (const auto& [tile_id, boxes] : per_tile) {
        for (const auto& b : boxes) global.push_back(to_global(grid, tile_id, b));
    }
    return nms(global, seam_iou);
}

}  // namespace panicle
