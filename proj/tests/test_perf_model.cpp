// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <rowsplat/perf_model.hpp>
#include <rowsplat/scene_io.hpp>

#include "oracles.hpp"

#include <filesystem>
#include <random>

using namespace rowsplat;

namespace {

RowWorkStats single_tile(const std::vector<std::array<std::uint16_t, 16>>& gaussians) {
  RowWorkStats stats(1, 1);
  for (std::size_t g = 0; g < gaussians.size(); ++g) {
    RowWorkStats::GaussianRows rows;
    rows.gaussian = static_cast<std::uint32_t>(g);
    rows.rows = gaussians[g];
    stats.tiles[0].push_back(rows);
  }
  return stats;
}

RowWorkStats random_stats(std::mt19937_64& rng, int tiles, int max_gaussians) {
  RowWorkStats stats(tiles, 1);
  for (int t = 0; t < tiles; ++t) {
    const int n = static_cast<int>(rng() % static_cast<std::uint64_t>(max_gaussians + 1));
    for (int g = 0; g < n; ++g) {
      RowWorkStats::GaussianRows rows;
      rows.gaussian = static_cast<std::uint32_t>(g);
      for (auto& r : rows.rows) {
        r = static_cast<std::uint16_t>(rng() % 17);
      }
      stats.tiles[static_cast<std::size_t>(t)].push_back(rows);
    }
  }
  return stats;
}

}  // namespace

TEST_CASE("utilization on hand-computed fixtures") {
  std::array<std::uint16_t, 16> skewed{};
  skewed[0] = 10;
  skewed[1] = 2;
  const auto u = simt_utilization(single_tile({skewed}));
  REQUIRE(u.has_value());
  CHECK(*u == doctest::Approx(12.0 / 160.0));  // 7.5%

  std::array<std::uint16_t, 16> uniform;
  uniform.fill(4);
  CHECK(*simt_utilization(single_tile({uniform})) == doctest::Approx(1.0));

  CHECK_FALSE(simt_utilization(RowWorkStats(2, 2)).has_value());
}

TEST_CASE("tile engine steps on degenerate workloads") {
  SUBCASE("all work on one row: no lockstep penalty beyond row generation") {
    std::array<std::uint16_t, 16> one_row{};
    one_row[5] = 14;
    const PerfReport r = tile_engine_steps(single_tile({one_row}));
    CHECK(r.frame_steps_rowpe == 14 + 1);  // queue + 1 row-generation step
    CHECK(r.frame_steps_lockstep_proxy == 14);
  }
  SUBCASE("uniform work w for G gaussians: the max queue is 2wG") {
    std::array<std::uint16_t, 16> uniform;
    uniform.fill(3);
    const int gaussians = 5;
    const PerfReport r =
        tile_engine_steps(single_tile(std::vector<std::array<std::uint16_t, 16>>(
            gaussians, uniform)));
    // Each PE serves 2 rows of 3 fragments per gaussian, plus 16 rowgen
    // steps per gaussian.
    CHECK(r.frame_steps_rowpe == 2 * 3 * gaussians + 16 * gaussians);
    CHECK(r.frame_steps_lockstep_proxy == 3 * gaussians);
  }
}

TEST_CASE("speedup proxy exceeds 1 on imbalanced workloads") {
  std::mt19937_64 rng(2);
  std::vector<std::array<std::uint16_t, 16>> gaussians;
  for (int g = 0; g < 40; ++g) {
    std::array<std::uint16_t, 16> rows{};
    rows[rng() % 16] = static_cast<std::uint16_t>(4 + rng() % 12);  // one busy row each
    gaussians.push_back(rows);
  }
  const PerfReport r = tile_engine_steps(single_tile(gaussians));
  CHECK(r.speedup_proxy > 1.0);
}

TEST_CASE("row-PE steps never exceed the lockstep lane-step budget") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const RowWorkStats stats = random_stats(rng, 4, 6);
    const PerfReport r = tile_engine_steps(stats);
    CHECK(r.frame_steps_rowpe <= r.lockstep_lane_step_budget);
  }
}

TEST_CASE("models are pure functions of the stats") {
  std::mt19937_64 rng(5);
  const RowWorkStats stats = random_stats(rng, 8, 5);
  const PerfReport a = tile_engine_steps(stats);
  const PerfReport b = tile_engine_steps(stats);
  CHECK(a.frame_steps_rowpe == b.frame_steps_rowpe);
  CHECK(a.lockstep_lane_steps == b.lockstep_lane_steps);
  CHECK(simt_utilization(stats) == simt_utilization(stats));
}

TEST_CASE("engine config must cover the tile") {
  EngineConfig bad;
  bad.rows_per_pe = 3;
  CHECK_THROWS_AS((void)tile_engine_steps(RowWorkStats(1, 1), bad), DataError);
}

TEST_CASE("row work stats survive a json round trip") {
  const Scene scene = synthetic_scene(oracle::realistic_config(300, 606));
  const Camera cam = oracle::make_camera(160, 160);
  const IrssResult out = render_irss(scene, cam, RenderConfig{});
  REQUIRE_FALSE(out.row_work.empty());

  const std::string path =
      (std::filesystem::temp_directory_path() / "rowsplat_rowwork.json").string();
  save_row_work_stats(out.row_work, path);
  const RowWorkStats back = load_row_work_stats(path);
  CHECK(back.tiles_x == out.row_work.tiles_x);
  REQUIRE(back.tiles.size() == out.row_work.tiles.size());
  for (std::size_t t = 0; t < back.tiles.size(); ++t) {
    REQUIRE(back.tiles[t].size() == out.row_work.tiles[t].size());
    for (std::size_t g = 0; g < back.tiles[t].size(); ++g) {
      CHECK(back.tiles[t][g].gaussian == out.row_work.tiles[t][g].gaussian);
      CHECK(back.tiles[t][g].rows == out.row_work.tiles[t][g].rows);
    }
  }
  // The models agree on the round-tripped stats.
  CHECK(tile_engine_steps(back).frame_steps_rowpe ==
        tile_engine_steps(out.row_work).frame_steps_rowpe);
}
