#pragma once

#include "panicle/geometry.hpp"

#include <map>
#include <string>
#include <vector>

namespace panicle {

struct Tile {
    int tile_id = 0;
    int origin_x = 0;
    int origin_y = 0;

    friend bool operator==(const Tile&, const Tile&) = default;
};

/// Fixed-size tiles over a mosaic. Tile ids are row-major from 0. Origins step
/// by (tile - overlap); the last row and column are shifted inward so they end
/// exactly on the mosaic edge.
class TileGrid {
public:
    int mosaic_width() const noexcept { return mosaic_width_; }
    int mosaic_height() const noexcept { return mosaic_height_; }
    int tile_width() const noexcept { return tile_width_; }
    int tile_height() const noexcept { return tile_height_; }
    int overlap_x() const noexcept { return overlap_x_; }
    int overlap_y() const noexcept { return overlap_y_; }
    int columns() const noexcept { return columns_; }
    int rows() const noexcept { return rows_; }
    const std::vector<Tile>& tiles() const noexcept { return tiles_; }

    /// Throws DomainError(UnknownTile).
    const Tile& tile(int tile_id) const;

    /// Manifest CSV "tile_id,origin_x,origin_y,width,height".
    std::string manifest_csv() const;

private:
    friend TileGrid build_grid(int, int, int, int, int, int);

    int mosaic_width_ = 0;
    int mosaic_height_ = 0;
    int tile_width_ = 0;
    int tile_height_ = 0;
    int overlap_x_ = 0;
    int overlap_y_ = 0;
    int columns_ = 0;
    int rows_ = 0;
    std::vector<Tile> tiles_;
};

/// Throws DomainError(InvalidGeometry) on non-positive sizes, tiles larger
/// than the mosaic, or overlaps outside [0, tile).
TileGrid build_grid(int mosaic_w, int mosaic_h, int tile_w, int tile_h, int overlap_x = 0,
                    int overlap_y = 0);

/// Tile-local to mosaic coordinates. Throws DomainError(UnknownTile) or
/// DomainError(OutOfTileBounds).
ScoredBox to_global(const TileGrid& grid, int tile_id, const ScoredBox& local);
ScoredBox to_local(const TileGrid& grid, int tile_id, const ScoredBox& global);

/// Remaps every tile's detections to mosaic coordinates and suppresses seam
/// duplicates with NMS at `seam_iou`. Independent of tile enumeration order.
std::vector<ScoredBox> merge_tiles(const TileGrid& grid,
                                   const std::map<int, std::vector<ScoredBox>>& per_tile,
                                   double seam_iou = 0.5);

}  // namespace panicle
