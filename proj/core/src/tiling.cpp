// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/tiling.hpp"

#include <algorithm>
#include <cmath>

namespace rowsplat {

float truncation_radius(const Eigen::Matrix2f& cov2d) {
  const double a = cov2d(0, 0);
  const double b = 0.5 * (cov2d(0, 1) + cov2d(1, 0));
  const double c = cov2d(1, 1);
  const double lambda_max = 0.5 * (a + c) + std::hypot(0.5 * (a - c), b);
  return 3.0f * static_cast<float>(std::sqrt(std::max(lambda_max, 0.0)));
}

float truncation_radius(const Splat2D& splat) { return truncation_radius(splat.cov2d); }

TileWorklist bin_coarse(std::span<const std::optional<Splat2D>> splats, int width, int height) {
  TileWorklist wl;
  wl.tiles_x = (width + kTileSize - 1) / kTileSize;
  wl.tiles_y = (height + kTileSize - 1) / kTileSize;
  wl.tiles.assign(static_cast<std::size_t>(wl.tile_count()), {});

  for (std::uint32_t i = 0; i < splats.size(); ++i) {
    if (!splats[i].has_value()) {
      continue;
    }
    const Splat2D& s = *splats[i];
    const float r = truncation_radius(s);
    const int tx0 = std::max(0, static_cast<int>(std::floor((s.mean2d.x() - r) / kTileSize)));
    const int tx1 = std::min(wl.tiles_x - 1,
                             static_cast<int>(std::floor((s.mean2d.x() + r) / kTileSize)));
    const int ty0 = std::max(0, static_cast<int>(std::floor((s.mean2d.y() - r) / kTileSize)));
    const int ty1 = std::min(wl.tiles_y - 1,
                             static_cast<int>(std::floor((s.mean2d.y() + r) / kTileSize)));
    for (int ty = ty0; ty <= ty1; ++ty) {
      for (int tx = tx0; tx <= tx1; ++tx) {
        wl.tiles[static_cast<std::size_t>(wl.tile_ordinal(tx, ty))].push_back({i, s.depth});
      }
    }
  }
  return wl;
}

bool exact_tile_intersection(const IrssParams& params, int tile_x, int tile_y) {
  if (params.empty_footprint()) {
    return false;
  }
  const int col_begin = tile_x * kTileSize;
  const int col_end = col_begin + kTileSize - 1;
  const int row_begin = tile_y * kTileSize;
  for (int row = row_begin; row < row_begin + kTileSize; ++row) {
    if (locate_first_fragment(params, row, col_begin, col_end).status ==
        RowLocateStatus::kFound) {
      return true;
    }
  }
  return false;
}

void sort_tiles(TileWorklist& worklist) {
  for (auto& list : worklist.tiles) {
    std::sort(list.begin(), list.end(), [](const TileBinEntry& l, const TileBinEntry& r) {
      return l.depth != r.depth ? l.depth < r.depth : l.splat < r.splat;
    });
  }
}

CacheTrace emit_access_trace(const TileWorklist& worklist,
                             std::span<const std::optional<Splat2D>> splats, bool refined,
                             float alpha_min) {
  // Built lazily: only splats that land in several tiles pay for a transform.
  std::vector<std::optional<IrssParams>> params(refined ? splats.size() : 0);
  const auto params_for = [&](std::uint32_t splat) -> const IrssParams& {
    auto& slot = params[splat];
    if (!slot.has_value()) {
      slot = build_irss_params(*splats[splat], alpha_min);
    }
    return *slot;
  };

  CacheTrace trace;
  for (int ty = 0; ty < worklist.tiles_y; ++ty) {
    for (int tx = 0; tx < worklist.tiles_x; ++tx) {
      const std::uint64_t ordinal = static_cast<std::uint64_t>(worklist.tile_ordinal(tx, ty));
      for (const TileBinEntry& entry : worklist.tiles[ordinal]) {
        if (refined && !exact_tile_intersection(params_for(entry.splat), tx, ty)) {
          continue;
        }
        trace.accesses.push_back({ordinal, entry.splat, kNoNextUse});
      }
    }
  }
  return trace;
}

}  // namespace rowsplat
