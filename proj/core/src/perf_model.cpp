// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/perf_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>

namespace rowsplat {

std::optional<double> simt_utilization(const RowWorkStats& stats) {
  std::uint64_t useful = 0;
  std::uint64_t lockstep = 0;
  for (const auto& tile : stats.tiles) {
    for (const RowWorkStats::GaussianRows& g : tile) {
      const std::uint64_t max_row = *std::max_element(g.rows.begin(), g.rows.end());
      lockstep += static_cast<std::uint64_t>(kTileSize) * max_row;
      useful += std::accumulate(g.rows.begin(), g.rows.end(), std::uint64_t{0});
    }
  }
  if (lockstep == 0) {
    return std::nullopt;
  }
  return static_cast<double>(useful) / static_cast<double>(lockstep);
}

PerfReport tile_engine_steps(const RowWorkStats& stats, const EngineConfig& config) {
  if (config.row_pe_count * config.rows_per_pe != kTileSize) {
    throw DataError("engine config must cover the 16 rows of a tile");
  }

  PerfReport report;
  report.utilization = simt_utilization(stats);

  std::vector<std::uint64_t> queues(static_cast<std::size_t>(config.row_pe_count));
  for (const auto& tile : stats.tiles) {
    std::fill(queues.begin(), queues.end(), 0);
    std::uint64_t rowgen = 0;
    std::uint64_t lockstep_wall = 0;
    for (const RowWorkStats::GaussianRows& g : tile) {
      std::uint64_t max_row = 0;
      for (int row = 0; row < kTileSize; ++row) {
        const std::uint64_t work = g.rows[static_cast<std::size_t>(row)];
        queues[static_cast<std::size_t>(row / config.rows_per_pe)] += work;
        max_row = std::max(max_row, work);
        if (work > 0) {
          rowgen += static_cast<std::uint64_t>(config.row_generation_cost);
        }
      }
      lockstep_wall += max_row;
    }
    const std::uint64_t max_queue = *std::max_element(queues.begin(), queues.end());
    report.frame_steps_rowpe += max_queue / static_cast<std::uint64_t>(config.issue_rate) + rowgen;
    report.frame_steps_lockstep_proxy += lockstep_wall;
    report.lockstep_lane_steps += static_cast<std::uint64_t>(kTileSize) * lockstep_wall;
    report.lockstep_lane_step_budget +=
        static_cast<std::uint64_t>(kTileSize) * lockstep_wall + rowgen;
  }
  report.speedup_proxy =
      report.frame_steps_rowpe
          ? static_cast<double>(report.lockstep_lane_steps) /
                static_cast<double>(report.frame_steps_rowpe)
          : 0.0;
  return report;
}

void save_row_work_stats(const RowWorkStats& stats, const std::string& path) {
  nlohmann::json doc;
  doc["tiles_x"] = stats.tiles_x;
  doc["tiles_y"] = stats.tiles_y;
  nlohmann::json tiles = nlohmann::json::array();
  for (std::size_t ordinal = 0; ordinal < stats.tiles.size(); ++ordinal) {
    if (stats.tiles[ordinal].empty()) {
      continue;
    }
    nlohmann::json entries = nlohmann::json::array();
    for (const RowWorkStats::GaussianRows& g : stats.tiles[ordinal]) {
      entries.push_back({{"gaussian", g.gaussian}, {"rows", g.rows}});
    }
    tiles.push_back({{"tile", ordinal}, {"gaussians", std::move(entries)}});
  }
  doc["tiles"] = std::move(tiles);
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open row-work stats for writing: " + path);
  }
  out << doc.dump() << "\n";
}

RowWorkStats load_row_work_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open row-work stats: " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
    RowWorkStats stats(doc.at("tiles_x").get<int>(), doc.at("tiles_y").get<int>());
    for (const nlohmann::json& tile : doc.at("tiles")) {
      const std::size_t ordinal = tile.at("tile").get<std::size_t>();
      if (ordinal >= stats.tiles.size()) {
        throw FormatError("row-work stats: tile ordinal out of range");
      }
      for (const nlohmann::json& entry : tile.at("gaussians")) {
        RowWorkStats::GaussianRows g;
        g.gaussian = entry.at("gaussian").get<std::uint32_t>();
        const auto& rows = entry.at("rows");
        if (rows.size() != kTileSize) {
          throw FormatError("row-work stats: rows must have 16 entries");
        }
        for (std::size_t i = 0; i < g.rows.size(); ++i) {
          g.rows[i] = rows.at(i).get<std::uint16_t>();
        }
        stats.tiles[ordinal].push_back(g);
      }
    }
    return stats;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("row-work stats JSON error: ") + e.what());
  }
}

}  // namespace rowsplat
