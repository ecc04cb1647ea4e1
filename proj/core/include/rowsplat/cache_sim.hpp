// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace rowsplat {

inline constexpr std::uint64_t kNoNextUse = std::numeric_limits<std::uint64_t>::max();

/// One Gaussian-feature fetch by the tile engine. `next_use` is the tile
/// ordinal at which the same gaussian is fetched again (kNoNextUse if never),
/// filled in by precompute_reuse_distances.
struct CacheAccess {
  std::uint64_t tile = 0;
  std::uint32_t gaussian = 0;
  std::uint64_t next_use = kNoNextUse;
};

struct CacheTrace {
  std::vector<CacheAccess> accesses;
  bool annotated = false;
};

/// Annotates every access with its next-use tile ordinal in a single
/// backward pass. Throws DataError if tile ordinals ever decrease.
CacheTrace precompute_reuse_distances(CacheTrace trace);

enum class CachePolicy {
  kReuseDistance,  // precomputed next-use, evict the farthest (ties: lower id)
  kLru,
  kOptOracle,      // forward-looking optimal, independent of annotations
  kNone,           // no cache: every access goes off-chip
};

std::string to_string(CachePolicy policy);
CachePolicy cache_policy_from_string(const std::string& name);

struct CacheConfig {
  std::size_t capacity_bytes = 32 * 1024;
  /// One Gaussian feature record: 2D mean (8) + transform/conic params (24) +
  /// color (12) + opacity and metadata (4).
  std::size_t line_bytes = 48;
  CachePolicy policy = CachePolicy::kReuseDistance;

  std::size_t lines() const { return capacity_bytes / line_bytes; }
};

struct CacheStats {
  CachePolicy policy = CachePolicy::kReuseDistance;
  std::size_t capacity_bytes = 0;
  std::size_t line_bytes = 0;
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t bytes_read = 0;  // misses * line_bytes

  double hit_rate() const {
    return accesses ? static_cast<double>(hits) / static_cast<double>(accesses) : 0.0;
  }
};

/// Trace-driven, fully associative simulation. The reuse-distance policy
/// requires an annotated trace; it keeps an absolute next-use field per
/// resident line (hit: overwrite with the access's next use; miss: evict the
/// maximum next-use, ties broken toward the lower gaussian id).
/// Throws DataError when capacity holds less than one line, or when the
/// reuse-distance policy is run on an unannotated trace.
CacheStats simulate(const CacheTrace& trace, const CacheConfig& config);

struct SweepPoint {
  std::size_t capacity_bytes = 0;
  CachePolicy policy = CachePolicy::kReuseDistance;
  double hit_rate = 0.0;
};

std::vector<SweepPoint> sweep_hit_rate(const CacheTrace& trace,
                                       const std::vector<std::size_t>& capacities,
                                       const CacheConfig& base);

/// CSV: header `tile_ordinal,splat_index`, one access per row.
void save_trace_csv(const CacheTrace& trace, const std::string& path);
CacheTrace load_trace_csv(const std::string& path);

}  // namespace rowsplat
