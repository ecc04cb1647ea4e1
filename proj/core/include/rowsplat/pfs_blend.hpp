// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rowsplat/image.hpp"
#include "rowsplat/tiling.hpp"

#include <span>

namespace rowsplat {

enum class Precision { kFp32, kFp64Accum, kFp16Emulated };
enum class Dataflow { kPfs, kIrss };

std::string to_string(Precision precision);
Precision precision_from_string(const std::string& name);
std::string to_string(Dataflow dataflow);
Dataflow dataflow_from_string(const std::string& name);

struct RenderConfig {
  Precision precision = Precision::kFp32;
  Eigen::Vector3f background = Eigen::Vector3f::Zero();
  /// Depth-ordered lists are processed in consecutive chunks of this many
  /// splats (0 = one chunk). Output-invariant; mirrors the chunked binning
  /// pipeline contract.
  std::size_t chunk_size = 0;
  /// Accounting-only switch: charge 3 FLOPs per shared fragment (whitening
  /// transform alone) instead of 2 (with the row-aligning rotation).
  bool transform1_only_flops = false;
  float alpha_min = 1.0f / 255.0f;
  float alpha_clamp = 0.99f;
  float transmittance_stop = 1e-4f;
};

/// Semantic FLOP and fragment accounting. Conventions: direct exponent = 11
/// (2 sub + 5 mul + 4 add of the symmetric quadratic form); row-shared
/// exponent = 2 per fragment after the first of a segment (3 in
/// transform-1-only mode), 11 for the first; blend = 9 per blended fragment.
struct FlopCounters {
  std::uint64_t exponent_flops = 0;
  std::uint64_t blend_flops = 0;
  std::uint64_t fragments_evaluated = 0;
  std::uint64_t fragments_significant = 0;
  std::uint64_t fragments_skipped = 0;
  std::uint64_t rows_skipped = 0;
  std::uint64_t gaussians_skipped = 0;
  std::uint64_t row_segments = 0;

  FlopCounters& operator+=(const FlopCounters& other);
};

/// Lockstep lane accounting of the tile-parallel dataflow: every
/// (tile, gaussian) pair burns 256 lanes, useful ones carry a significant
/// fragment.
struct LockstepStats {
  std::uint64_t lane_steps = 0;
  std::uint64_t useful_lane_steps = 0;

  double useful_fraction() const {
    return lane_steps ? static_cast<double>(useful_lane_steps) / static_cast<double>(lane_steps)
                      : 0.0;
  }

  LockstepStats& operator+=(const LockstepStats& other);
};

/// Direct quadratic-form exponent (P - mean)^T inv_cov (P - mean).
/// Adds 11 to counters->exponent_flops when counters is given.
float exponent_direct(const Eigen::Vector2f& pixel_center, const Splat2D& splat,
                      FlopCounters* counters = nullptr);

/// alpha = min(alpha_clamp, opacity * exp(-q/2)).
float alpha_value(float exponent, float opacity, const RenderConfig& config = {});

struct BlendInput {
  float alpha = 0.0f;
  Eigen::Vector3f color = Eigen::Vector3f::Zero();
};

struct BlendResult {
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  double transmittance = 1.0;
};

/// Depth-ordered alpha blend of one pixel's fragments at the configured
/// precision; stops once transmittance falls below the stop threshold and
/// composites over the configured background.
BlendResult blend_pixel(std::span<const BlendInput> fragments, const RenderConfig& config = {});

struct PfsResult {
  ImageBuffer image;
  FlopCounters counters;
  LockstepStats lockstep;
};

/// Baseline tile-parallel render: every gaussian of a tile evaluates all 256
/// fragments in depth order (lockstep model), significant ones blend.
PfsResult render_pfs(const Scene& scene, const Camera& camera, const RenderConfig& config);

/// Same, over a caller-provided (already sorted) worklist. Used to check
/// that coarse and refined worklists render identically.
PfsResult render_pfs_over_worklist(std::span<const std::optional<Splat2D>> splats,
                                   const TileWorklist& worklist, const Camera& camera,
                                   const RenderConfig& config);

}  // namespace rowsplat
