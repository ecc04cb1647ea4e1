// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <rowsplat/irss_core.hpp>
#include <rowsplat/scene_io.hpp>

#include <Eigen/Dense>

namespace {

using namespace rowsplat;

SyntheticConfig bench_config(std::size_t count) {
  SyntheticConfig cfg;
  cfg.count = count;
  cfg.extent_min = {-7.0f, -5.0f, 8.0f};
  cfg.extent_max = {7.0f, 5.0f, 20.0f};
  cfg.scale_min = 0.009;
  cfg.scale_max = 0.055;
  cfg.opacity_min = 0.15;
  cfg.opacity_max = 0.95;
  cfg.max_anisotropy = 7.0;
  cfg.seed = 1;
  return cfg;
}

Camera bench_camera() {
  Camera cam;
  cam.fx = cam.fy = 500.0f;
  cam.cx = 320.0f;
  cam.cy = 240.0f;
  cam.width = 640;
  cam.height = 480;
  cam.near_z = 0.2f;
  cam.far_z = 100.0f;
  return cam;
}

void BM_ExponentDirect(benchmark::State& state) {
  const Splat2D s = [] {
    Splat2D splat;
    splat.mean2d = {100.0f, 100.0f};
    splat.cov2d << 9.0f, 2.0f, 2.0f, 4.0f;
    splat.inv_cov2d = splat.cov2d.inverse();
    splat.opacity = 0.8f;
    return splat;
  }();
  for (auto _ : state) {
    float acc = 0.0f;
    for (int col = 0; col < 256; ++col) {
      acc += exponent_direct({col + 0.5f, 100.5f}, s);
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_ExponentDirect);

void BM_ExponentRowShared(benchmark::State& state) {
  const Splat2D s = [] {
    Splat2D splat;
    splat.mean2d = {100.0f, 100.0f};
    splat.cov2d << 9.0f, 2.0f, 2.0f, 4.0f;
    splat.inv_cov2d = splat.cov2d.inverse();
    splat.opacity = 0.8f;
    return splat;
  }();
  const IrssParams p = build_irss_params(s, 1.0f / 255.0f);
  for (auto _ : state) {
    // Incremental walk along one row: the transform runs once, each next
    // fragment is one increment and one square.
    const Eigen::Vector2d first(0.5, 100.5);
    Eigen::Vector2d v = p.map * (first - p.mean2d);
    const double y_sq = v.y() * v.y();
    double x = v.x();
    double acc = x * x + y_sq;
    for (int col = 1; col < 256; ++col) {
      x += p.col_step;
      acc += x * x + y_sq;
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_ExponentRowShared);

void BM_RenderPfs(benchmark::State& state) {
  const Scene scene = synthetic_scene(bench_config(static_cast<std::size_t>(state.range(0))));
  const Camera cam = bench_camera();
  for (auto _ : state) {
    const PfsResult out = render_pfs(scene, cam, RenderConfig{});
    benchmark::DoNotOptimize(out.counters.exponent_flops);
  }
}
BENCHMARK(BM_RenderPfs)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RenderIrss(benchmark::State& state) {
  const Scene scene = synthetic_scene(bench_config(static_cast<std::size_t>(state.range(0))));
  const Camera cam = bench_camera();
  for (auto _ : state) {
    const IrssResult out = render_irss(scene, cam, RenderConfig{});
    benchmark::DoNotOptimize(out.counters.exponent_flops);
  }
}
BENCHMARK(BM_RenderIrss)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_CacheSimReuseDistance(benchmark::State& state) {
  const Scene scene = synthetic_scene(bench_config(10000));
  const Camera cam = bench_camera();
  const auto splats = project_scene(scene, cam);
  TileWorklist wl = bin_coarse(splats, cam.width, cam.height);
  sort_tiles(wl);
  const CacheTrace trace = precompute_reuse_distances(emit_access_trace(wl, splats, false));
  CacheConfig config;
  config.capacity_bytes = 32 * 1024;
  for (auto _ : state) {
    const CacheStats stats = simulate(trace, config);
    benchmark::DoNotOptimize(stats.hits);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.accesses.size()));
}
BENCHMARK(BM_CacheSimReuseDistance);

}  // namespace

BENCHMARK_MAIN();
