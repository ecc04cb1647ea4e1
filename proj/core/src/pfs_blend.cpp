// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/pfs_blend.hpp"

#include "rowsplat/irss_params.hpp"
#include "render_detail.hpp"

#include <algorithm>
#include <cmath>

namespace rowsplat {

std::string to_string(Precision precision) {
  switch (precision) {
    case Precision::kFp32: return "fp32";
    case Precision::kFp64Accum: return "fp64-accum";
    case Precision::kFp16Emulated: return "fp16-emulated";
  }
  return "fp32";
}

Precision precision_from_string(const std::string& name) {
  if (name == "fp32") return Precision::kFp32;
  if (name == "fp64-accum") return Precision::kFp64Accum;
  if (name == "fp16-emulated") return Precision::kFp16Emulated;
  throw DataError("unknown precision: " + name);
}

std::string to_string(Dataflow dataflow) {
  return dataflow == Dataflow::kPfs ? "pfs" : "irss";
}

Dataflow dataflow_from_string(const std::string& name) {
  if (name == "pfs") return Dataflow::kPfs;
  if (name == "irss") return Dataflow::kIrss;
  throw DataError("unknown dataflow: " + name);
}

FlopCounters& FlopCounters::operator+=(const FlopCounters& other) {
  exponent_flops += other.exponent_flops;
  blend_flops += other.blend_flops;
  fragments_evaluated += other.fragments_evaluated;
  fragments_significant += other.fragments_significant;
  fragments_skipped += other.fragments_skipped;
  rows_skipped += other.rows_skipped;
  gaussians_skipped += other.gaussians_skipped;
  row_segments += other.row_segments;
  return *this;
}

LockstepStats& LockstepStats::operator+=(const LockstepStats& other) {
  lane_steps += other.lane_steps;
  useful_lane_steps += other.useful_lane_steps;
  return *this;
}

float exponent_direct(const Eigen::Vector2f& pixel_center, const Splat2D& splat,
                      FlopCounters* counters) {
  if (counters != nullptr) {
    counters->exponent_flops += detail::kDirectExponentFlops;
  }
  return detail::exponent_direct_value<float>(pixel_center.x(), pixel_center.y(), splat);
}

float alpha_value(float exponent, float opacity, const RenderConfig& config) {
  return detail::alpha_from_exponent<detail::ArithFp32>(exponent, opacity, config);
}

BlendResult blend_pixel(std::span<const BlendInput> fragments, const RenderConfig& config) {
  ImageBuffer one(1, 1, config.background);
  detail::dispatch_precision(config.precision, [&](auto arith) {
    using A = decltype(arith);
    for (const BlendInput& f : fragments) {
      if (!detail::blend_fragment<A>(one, 0, static_cast<typename A::Real>(f.alpha), f.color,
                                     config)) {
        break;
      }
    }
  });
  BlendResult out;
  out.color = one.composited(0, 0);
  out.transmittance = one.transmittance[0];
  return out;
}

namespace {

template <class A>
void shade_tile_pair(const Splat2D& splat, double threshold, int tile_x, int tile_y,
                     const Camera& cam, const RenderConfig& config, ImageBuffer& image,
                     FlopCounters& counters, LockstepStats& lockstep) {
  using R = typename A::Real;
  const int px0 = tile_x * kTileSize;
  const int py0 = tile_y * kTileSize;

  // Lockstep model: all 256 lanes burn whether or not the fragment matters.
  lockstep.lane_steps += kTileSize * kTileSize;
  counters.fragments_evaluated += kTileSize * kTileSize;
  counters.exponent_flops += detail::kDirectExponentFlops * kTileSize * kTileSize;

  for (int dy = 0; dy < kTileSize; ++dy) {
    const int py = py0 + dy;
    if (py >= cam.height) {
      continue;  // lanes past the image edge never produce fragments
    }
    for (int dx = 0; dx < kTileSize; ++dx) {
      const int px = px0 + dx;
      if (px >= cam.width) {
        continue;
      }
      const double cx = px + 0.5;
      const double cy = py + 0.5;
      const double q_decision = detail::exponent_direct_value<double>(cx, cy, splat);
      if (q_decision > threshold) {
        continue;
      }
      ++counters.fragments_significant;
      ++lockstep.useful_lane_steps;

      const R q = detail::exponent_direct_value<R>(static_cast<R>(cx), static_cast<R>(cy), splat);
      const R a = detail::alpha_from_exponent<A>(q, splat.opacity, config);
      const std::size_t pixel = image.pixel_index(px, py);
      if (detail::blend_fragment<A>(image, pixel, a, splat.color, config)) {
        counters.blend_flops += detail::kBlendFlops;
      }
    }
  }
}

}  // namespace

PfsResult render_pfs_over_worklist(std::span<const std::optional<Splat2D>> splats,
                                   const TileWorklist& worklist, const Camera& camera,
                                   const RenderConfig& config) {
  PfsResult result{ImageBuffer(camera.width, camera.height, config.background), FlopCounters{},
                   LockstepStats{}};

  detail::dispatch_precision(config.precision, [&](auto arith) {
    using A = decltype(arith);
    for (int ty = 0; ty < worklist.tiles_y; ++ty) {
      for (int tx = 0; tx < worklist.tiles_x; ++tx) {
        const auto& list = worklist.tiles[static_cast<std::size_t>(worklist.tile_ordinal(tx, ty))];
        const std::size_t chunk = config.chunk_size == 0 ? list.size() : config.chunk_size;
        for (std::size_t begin = 0; begin < list.size(); begin += chunk) {
          const std::size_t end = std::min(list.size(), begin + chunk);
          for (std::size_t i = begin; i < end; ++i) {
            const Splat2D& splat = *splats[list[i].splat];
            const double th = significance_threshold(splat.opacity, config.alpha_min);
            shade_tile_pair<A>(splat, th, tx, ty, camera, config, result.image, result.counters,
                               result.lockstep);
          }
        }
      }
    }
  });
  result.counters.fragments_skipped =
      result.counters.fragments_evaluated - result.counters.fragments_significant;
  return result;
}

PfsResult render_pfs(const Scene& scene, const Camera& camera, const RenderConfig& config) {
  camera.validate();
  const std::vector<std::optional<Splat2D>> splats = project_scene(scene, camera);
  TileWorklist worklist = bin_coarse(splats, camera.width, camera.height);
  worklist.chunk_size = config.chunk_size;
  sort_tiles(worklist);
  return render_pfs_over_worklist(splats, worklist, camera, config);
}

}  // namespace rowsplat
