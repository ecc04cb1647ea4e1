// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rowsplat/irss_core.hpp"

#include <optional>

namespace rowsplat {

/// Row-centric tile engine geometry: 8 row PEs, 2 tile rows each, one
/// fragment issued per PE and step, one step of row generation per
/// (gaussian, intersected row).
struct EngineConfig {
  int row_pe_count = 8;
  int rows_per_pe = 2;
  int issue_rate = 1;
  int row_generation_cost = 1;
};

/// Fraction of useful SIMT lane-steps when each gaussian's 16 tile rows run
/// in lockstep for the duration of its longest row. Empty stats -> nullopt.
std::optional<double> simt_utilization(const RowWorkStats& stats);

struct PerfReport {
  std::optional<double> utilization;
  /// Wall steps of the 16-lane lockstep mapping: sum over (tile, gaussian)
  /// of the max row length. Reported for reference, not an upper bound on
  /// the row-PE model (2 rows share a PE there).
  std::uint64_t frame_steps_lockstep_proxy = 0;
  /// Total lockstep lane-step budget: sum of 16 * max row length, plus the
  /// same per-row generation cost the row-PE model pays. The row-PE steps
  /// never exceed this.
  std::uint64_t lockstep_lane_steps = 0;
  std::uint64_t lockstep_lane_step_budget = 0;
  /// Row-PE model: per tile, max over PEs of the aggregated queue length
  /// plus row-generation steps; tiles are processed one by one.
  std::uint64_t frame_steps_rowpe = 0;
  double speedup_proxy = 0.0;  // lockstep_lane_steps / frame_steps_rowpe
};

PerfReport tile_engine_steps(const RowWorkStats& stats, const EngineConfig& config = {});

void save_row_work_stats(const RowWorkStats& stats, const std::string& path);
RowWorkStats load_row_work_stats(const std::string& path);

}  // namespace rowsplat
