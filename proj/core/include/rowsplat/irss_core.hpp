// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rowsplat/irss_params.hpp"
#include "rowsplat/pfs_blend.hpp"

#include <array>

namespace rowsplat {

/// Shaded-fragment counts per (tile, gaussian, tile row), recorded by the
/// row-sequential render and consumed by the throughput models. Entries for
/// one gaussian stay contiguous within a tile.
struct RowWorkStats {
  struct GaussianRows {
    std::uint32_t gaussian = 0;
    std::array<std::uint16_t, kTileSize> rows{};  // counts, each <= 16
  };

  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::vector<GaussianRows>> tiles;

  RowWorkStats() = default;
  RowWorkStats(int tx, int ty) : tiles_x(tx), tiles_y(ty), tiles(static_cast<std::size_t>(tx) * ty) {}

  void add_fragment(int tile_ordinal, std::uint32_t gaussian, int row_in_tile);
  bool empty() const;
};

struct IrssResult {
  ImageBuffer image;
  FlopCounters counters;
  RowWorkStats row_work;
};

/// Row-sequential render. Gaussians are swept in global (depth, index)
/// order; each one shades its intersected image rows left to right from the
/// located first fragment to the last one inside the truncation bound, so a
/// row segment can span tile boundaries and intermediate state is shared
/// along the whole run. Per-pixel blend order is identical to render_pfs.
IrssResult render_irss(const Scene& scene, const Camera& camera, const RenderConfig& config);

/// Same dataflow over already-projected splats (the render-from-features
/// surface: preprocessing and depth ordering happen upstream).
IrssResult render_irss_splats(std::span<const std::optional<Splat2D>> splats, int width,
                              int height, const RenderConfig& config);

}  // namespace rowsplat
