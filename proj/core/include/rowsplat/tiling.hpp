// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rowsplat/cache_sim.hpp"
#include "rowsplat/irss_params.hpp"
#include "rowsplat/projection.hpp"

#include <span>

namespace rowsplat {

inline constexpr int kTileSize = 16;

struct TileBinEntry {
  std::uint32_t splat = 0;
  float depth = 0.0f;
};

/// Per-tile depth-sorted splat references. Tiles are processed row-major;
/// reuse distances and traces depend on that order, so it is part of the
/// stats contract.
struct TileWorklist {
  int tiles_x = 0;
  int tiles_y = 0;
  std::size_t chunk_size = 0;  // 0 = unchunked; splits each list by depth order
  std::vector<std::vector<TileBinEntry>> tiles;  // indexed by row-major ordinal

  int tile_count() const { return tiles_x * tiles_y; }
  int tile_ordinal(int tx, int ty) const { return ty * tiles_x + tx; }
};

/// 3-sigma truncation radius in pixels: 3 * sqrt(lambda_max(cov2d)).
float truncation_radius(const Eigen::Matrix2f& cov2d);
float truncation_radius(const Splat2D& splat);

/// Conservative binning: a splat lands in every tile whose rectangle
/// intersects the axis-aligned square of half-width truncation_radius
/// around its mean. Culled slots are ignored.
TileWorklist bin_coarse(std::span<const std::optional<Splat2D>> splats, int width, int height);

/// Exact test: true iff at least one of the tile's 16 rows has a non-empty
/// fragment interval per the row locator.
bool exact_tile_intersection(const IrssParams& params, int tile_x, int tile_y);

/// Sorts every tile list ascending by depth, ties by ascending splat index.
void sort_tiles(TileWorklist& worklist);

/// Gaussian-feature access sequence in tile processing order and per-tile
/// depth order. When `refined`, entries failing the exact intersection test
/// are dropped. The result is unannotated.
CacheTrace emit_access_trace(const TileWorklist& worklist,
                             std::span<const std::optional<Splat2D>> splats,
                             bool refined, float alpha_min = 1.0f / 255.0f);

}  // namespace rowsplat
