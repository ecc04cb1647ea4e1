// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <rowsplat/irss_core.hpp>
#include <rowsplat/scene_io.hpp>

#include "oracles.hpp"

#include <random>
#include <set>

using namespace rowsplat;

namespace {

std::set<std::size_t> non_background_pixels(const ImageBuffer& image) {
  std::set<std::size_t> out;
  for (std::size_t p = 0; p < image.transmittance.size(); ++p) {
    if (image.transmittance[p] != 1.0) {
      out.insert(p);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("IRSS render of an empty scene is background with zero counters") {
  Scene scene;
  const Camera cam = oracle::make_camera(64, 64);
  RenderConfig config;
  config.background = {0.1f, 0.2f, 0.3f};
  const IrssResult out = render_irss(scene, cam, config);
  CHECK(out.counters.fragments_evaluated == 0);
  CHECK(out.counters.exponent_flops == 0);
  CHECK(out.counters.row_segments == 0);
  CHECK(out.row_work.empty());
  CHECK(out.image.composite()[0] == doctest::Approx(0.1));
}

TEST_CASE("IRSS and PFS agree: fp32 PSNR and fp64 channel differences") {
  for (const std::uint64_t seed : {11ull, 12ull}) {
    const Scene scene = synthetic_scene(oracle::realistic_config(2000, seed));
    const Camera cam = oracle::make_camera(320, 240);

    RenderConfig fp32;
    const PfsResult pfs32 = render_pfs(scene, cam, fp32);
    const IrssResult irss32 = render_irss(scene, cam, fp32);
    CHECK(psnr_db(pfs32.image, irss32.image) >= 60.0);
    CHECK(non_background_pixels(pfs32.image) == non_background_pixels(irss32.image));

    RenderConfig fp64;
    fp64.precision = Precision::kFp64Accum;
    const PfsResult pfs64 = render_pfs(scene, cam, fp64);
    const IrssResult irss64 = render_irss(scene, cam, fp64);
    CHECK(max_channel_difference(pfs64.image, irss64.image) <= 1e-10);
  }
}

TEST_CASE("both dataflows shade exactly the same fragment multiset") {
  const Scene scene = synthetic_scene(oracle::realistic_config(800, 77));
  const Camera cam = oracle::make_camera(160, 160);
  const PfsResult pfs = render_pfs(scene, cam, RenderConfig{});
  const IrssResult irss = render_irss(scene, cam, RenderConfig{});
  CHECK(pfs.counters.fragments_significant == irss.counters.fragments_significant);
  CHECK(irss.counters.fragments_evaluated == irss.counters.fragments_significant);
}

TEST_CASE("chunked processing is output-invariant, bitwise") {
  const Scene scene = synthetic_scene(oracle::realistic_config(600, 303));
  const Camera cam = oracle::make_camera(160, 160);
  RenderConfig base;
  const PfsResult pfs_ref = render_pfs(scene, cam, base);
  const IrssResult irss_ref = render_irss(scene, cam, base);
  for (const std::size_t chunk : {1ul, 7ul, 64ul}) {
    RenderConfig cfg = base;
    cfg.chunk_size = chunk;
    CHECK(render_pfs(scene, cam, cfg).image.rgb == pfs_ref.image.rgb);
    CHECK(render_irss(scene, cam, cfg).image.rgb == irss_ref.image.rgb);
  }
}

TEST_CASE("coarse and refined worklists render bitwise-identical images in fp64") {
  const Scene scene = synthetic_scene(oracle::realistic_config(700, 505));
  const Camera cam = oracle::make_camera(160, 160);
  const auto splats = project_scene(scene, cam);
  TileWorklist coarse = bin_coarse(splats, cam.width, cam.height);
  sort_tiles(coarse);

  // Refined worklist: drop entries that fail the exact intersection test.
  TileWorklist refined = coarse;
  std::size_t dropped = 0;
  for (int ty = 0; ty < refined.tiles_y; ++ty) {
    for (int tx = 0; tx < refined.tiles_x; ++tx) {
      auto& list = refined.tiles[static_cast<std::size_t>(refined.tile_ordinal(tx, ty))];
      std::erase_if(list, [&](const TileBinEntry& e) {
        const IrssParams p = build_irss_params(*splats[e.splat], 1.0f / 255.0f);
        const bool keep = exact_tile_intersection(p, tx, ty);
        dropped += keep ? 0 : 1;
        return !keep;
      });
    }
  }
  REQUIRE(dropped > 0);

  RenderConfig fp64;
  fp64.precision = Precision::kFp64Accum;
  const PfsResult a = render_pfs_over_worklist(splats, coarse, cam, fp64);
  const PfsResult b = render_pfs_over_worklist(splats, refined, cam, fp64);
  CHECK(a.image.rgb == b.image.rgb);
  CHECK(a.image.transmittance == b.image.transmittance);
  CHECK(b.counters.fragments_evaluated < a.counters.fragments_evaluated);
  CHECK(a.counters.fragments_significant == b.counters.fragments_significant);
}

TEST_CASE("IRSS flop counter identity: 11 per segment + 2 per shared fragment") {
  const Scene scene = synthetic_scene(oracle::realistic_config(900, 88));
  const Camera cam = oracle::make_camera(320, 240);
  RenderConfig cfg;
  const IrssResult out = render_irss(scene, cam, cfg);
  const std::uint64_t segments = out.counters.row_segments;
  const std::uint64_t fragments = out.counters.fragments_evaluated;
  CHECK(out.counters.exponent_flops == 11 * segments + 2 * (fragments - segments));

  cfg.transform1_only_flops = true;
  const IrssResult t1 = render_irss(scene, cam, cfg);
  CHECK(t1.counters.exponent_flops == 11 * segments + 3 * (fragments - segments));
  CHECK(t1.counters.fragments_evaluated == fragments);
}

TEST_CASE("a crafted one-row splat costs 11 + 9*2 exponent flops") {
  // One significant row of exactly 10 fragments: half-width just under 5 px
  // in x, and a y sigma so small every other row fails the y'' test.
  const Splat2D s =
      oracle::make_splat({10.0f, 8.5f}, 4.99 / 3.0, 0.05, 0.0, 0.9f);  // Th = 9
  std::vector<std::optional<Splat2D>> splats{s};
  const IrssResult out = render_irss_splats(splats, 64, 64, RenderConfig{});
  CHECK(out.counters.row_segments == 1);
  CHECK(out.counters.fragments_evaluated == 10);
  CHECK(out.counters.exponent_flops == 11 + 9 * 2);
  CHECK(out.counters.rows_skipped > 0);
}

TEST_CASE("threshold boundary: q == Th shades, q just above exits") {
  // sigma = 1, opacity 0.9 -> Th = 9 exactly; the center row has pixel
  // centers at x'' = -3..3, so the closed boundary keeps 7 columns.
  const Splat2D exact = oracle::make_splat({12.5f, 12.5f}, 1.0, 0.05, 0.0, 0.9f);
  std::vector<std::optional<Splat2D>> splats{exact};
  const IrssResult on_boundary = render_irss_splats(splats, 32, 32, RenderConfig{});
  CHECK(on_boundary.counters.fragments_evaluated == 7);

  // Nudge the mean: both boundary fragments now sit just outside.
  const Splat2D nudged = oracle::make_splat({12.5f + 1e-6f, 12.5f}, 1.0, 0.05, 0.0, 0.9f);
  std::vector<std::optional<Splat2D>> splats2{nudged};
  const IrssResult off_boundary = render_irss_splats(splats2, 32, 32, RenderConfig{});
  CHECK(off_boundary.counters.fragments_evaluated == 6);
}

TEST_CASE("IRSS skipping is sound and complete against the grid oracle") {
  std::mt19937_64 rng(3001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const Splat2D s = oracle::make_splat(
        Eigen::Vector2f(static_cast<float>(u(rng) * 56), static_cast<float>(u(rng) * 56)),
        0.3 + 4.0 * u(rng), 0.3 + 4.0 * u(rng), 2.0 * M_PI * u(rng),
        static_cast<float>(0.05 + 0.9 * u(rng)), {1.0f, 1.0f, 1.0f}, 5.0f, 0);
    std::vector<std::optional<Splat2D>> splats{s};
    const IrssResult out = render_irss_splats(splats, 64, 64, RenderConfig{});

    std::set<std::size_t> shaded_pixels;
    for (std::size_t p = 0; p < out.image.transmittance.size(); ++p) {
      if (out.image.transmittance[p] != 1.0) {
        shaded_pixels.insert(p);
      }
    }
    std::set<std::size_t> oracle_pixels;
    for (const auto& [x, y] : oracle::grid_shaded(s, 0, 63, 0, 63, 1.0 / 255.0)) {
      oracle_pixels.insert(static_cast<std::size_t>(y) * 64 + static_cast<std::size_t>(x));
    }
    CHECK(shaded_pixels == oracle_pixels);
  }
}

TEST_CASE("a single-fragment splat has sharing ratio 1 and no shared flops") {
  // Footprint so small only the pixel under the mean is significant.
  const Splat2D s = oracle::make_splat({10.5f, 10.5f}, 0.3, 0.3, 0.0, 0.5f);
  std::vector<std::optional<Splat2D>> splats{s};
  const IrssResult out = render_irss_splats(splats, 32, 32, RenderConfig{});
  CHECK(out.counters.fragments_evaluated == 1);
  CHECK(out.counters.row_segments == 1);
  CHECK(out.counters.exponent_flops == 11);  // ratio 11*1/11 = 1: no sharing possible
}

TEST_CASE("a splat at or below alpha_min is skipped whole") {
  const Splat2D s = oracle::make_splat({10.5f, 10.5f}, 2.0, 2.0, 0.0, 1.0f / 255.0f);
  std::vector<std::optional<Splat2D>> splats{s};
  const IrssResult out = render_irss_splats(splats, 32, 32, RenderConfig{});
  CHECK(out.counters.gaussians_skipped == 1);
  CHECK(out.counters.fragments_evaluated == 0);
  CHECK(out.row_work.empty());
}

TEST_CASE("fp16 emulation stays close to fp32 on the demo scene") {
  const Scene scene = synthetic_scene(oracle::realistic_config(1500, 2024));
  const Camera cam = oracle::make_camera(320, 240);
  RenderConfig fp16;
  fp16.precision = Precision::kFp16Emulated;
  const IrssResult half = render_irss(scene, cam, fp16);
  const IrssResult full = render_irss(scene, cam, RenderConfig{});
  const double psnr = psnr_db(half.image, full.image);
  CHECK(psnr >= 40.0);
  CHECK(psnr < 90.0);  // it must actually be a degraded image, not a copy
}

TEST_CASE("sharing ratio grows toward 11/2 with segment length") {
  const Camera cam = oracle::make_camera(640, 480, 500.0f);
  double previous = 0.0;
  for (const double sigma_px : {4.0, 12.0, 40.0}) {
    const Scene scene =
        oracle::elongated_scene(60, sigma_px, 900 + static_cast<std::uint64_t>(sigma_px));
    const IrssResult out = render_irss(scene, cam, RenderConfig{});
    const double fragments = static_cast<double>(out.counters.fragments_evaluated);
    const double ratio = 11.0 * fragments / static_cast<double>(out.counters.exponent_flops);
    CHECK(ratio > previous);
    CHECK(ratio <= 5.5);
    previous = ratio;
  }
  CHECK(previous >= 5.0);
}
