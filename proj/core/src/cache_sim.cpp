// SPDX-License-Identifier: Apache-2.0
#include "rowsplat/cache_sim.hpp"

#include "rowsplat/types.hpp"

#include <algorithm>
#include <fstream>
#include <list>
#include <set>
#include <sstream>
#include <unordered_map>

namespace rowsplat {

CacheTrace precompute_reuse_distances(CacheTrace trace) {
  for (std::size_t i = 1; i < trace.accesses.size(); ++i) {
    if (trace.accesses[i].tile < trace.accesses[i - 1].tile) {
      throw DataError("trace tile ordinals must be non-decreasing");
    }
  }
  std::unordered_map<std::uint32_t, std::uint64_t> next_tile;
  next_tile.reserve(trace.accesses.size());
  for (std::size_t i = trace.accesses.size(); i-- > 0;) {
    CacheAccess& a = trace.accesses[i];
    const auto it = next_tile.find(a.gaussian);
    a.next_use = it == next_tile.end() ? kNoNextUse : it->second;
    next_tile[a.gaussian] = a.tile;
  }
  trace.annotated = true;
  return trace;
}

std::string to_string(CachePolicy policy) {
  switch (policy) {
    case CachePolicy::kReuseDistance: return "rd";
    case CachePolicy::kLru: return "lru";
    case CachePolicy::kOptOracle: return "opt";
    case CachePolicy::kNone: return "none";
  }
  return "rd";
}

CachePolicy cache_policy_from_string(const std::string& name) {
  if (name == "rd") return CachePolicy::kReuseDistance;
  if (name == "lru") return CachePolicy::kLru;
  if (name == "opt") return CachePolicy::kOptOracle;
  if (name == "none") return CachePolicy::kNone;
  throw DataError("unknown cache policy: " + name);
}

namespace {

CacheStats make_stats(const CacheConfig& config) {
  CacheStats s;
  s.policy = config.policy;
  s.capacity_bytes = config.capacity_bytes;
  s.line_bytes = config.line_bytes;
  return s;
}

CacheStats simulate_none(const CacheTrace& trace, const CacheConfig& config) {
  CacheStats s = make_stats(config);
  s.accesses = trace.accesses.size();
  s.misses = s.accesses;
  s.bytes_read = s.misses * config.line_bytes;
  return s;
}

// Resident lines ordered so the eviction victim (max next-use, ties toward
// the lower gaussian id) is always the last element.
struct VictimOrder {
  bool operator()(const std::pair<std::uint64_t, std::uint32_t>& a,
                  const std::pair<std::uint64_t, std::uint32_t>& b) const {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  }
};

CacheStats simulate_rd(const CacheTrace& trace, const CacheConfig& config) {
  if (!trace.annotated) {
    throw DataError("reuse-distance policy needs an annotated trace");
  }
  CacheStats s = make_stats(config);
  const std::size_t lines = config.lines();

  std::set<std::pair<std::uint64_t, std::uint32_t>, VictimOrder> order;
  std::unordered_map<std::uint32_t, std::uint64_t> resident;  // gaussian -> next_use
  resident.reserve(lines);

  for (const CacheAccess& a : trace.accesses) {
    ++s.accesses;
    const auto it = resident.find(a.gaussian);
    if (it != resident.end()) {
      ++s.hits;
      order.erase({it->second, a.gaussian});
      it->second = a.next_use;
      order.insert({a.next_use, a.gaussian});
      continue;
    }
    ++s.misses;
    if (resident.size() == lines) {
      const auto victim = std::prev(order.end());
      resident.erase(victim->second);
      order.erase(victim);
      ++s.evictions;
    }
    resident.emplace(a.gaussian, a.next_use);
    order.insert({a.next_use, a.gaussian});
  }
  s.bytes_read = s.misses * config.line_bytes;
  return s;
}

CacheStats simulate_lru(const CacheTrace& trace, const CacheConfig& config) {
  CacheStats s = make_stats(config);
  const std::size_t lines = config.lines();

  std::list<std::uint32_t> order;  // front = most recent
  std::unordered_map<std::uint32_t, std::list<std::uint32_t>::iterator> resident;
  resident.reserve(lines);

  for (const CacheAccess& a : trace.accesses) {
    ++s.accesses;
    const auto it = resident.find(a.gaussian);
    if (it != resident.end()) {
      ++s.hits;
      order.splice(order.begin(), order, it->second);
      continue;
    }
    ++s.misses;
    if (resident.size() == lines) {
      resident.erase(order.back());
      order.pop_back();
      ++s.evictions;
    }
    order.push_front(a.gaussian);
    resident[a.gaussian] = order.begin();
  }
  s.bytes_read = s.misses * config.line_bytes;
  return s;
}

// Forward-looking optimal replacement, independent of the trace's next-use
// annotations: per-gaussian access positions are indexed up front and the
// victim is the resident line whose next access lies in the farthest tile.
// Tile-granular on purpose: the reuse metric is "tiles processed until the
// next access", and access-granular MIN can differ by same-tile tie breaks.
CacheStats simulate_opt(const CacheTrace& trace, const CacheConfig& config) {
  CacheStats s = make_stats(config);
  const std::size_t lines = config.lines();

  std::unordered_map<std::uint32_t, std::vector<std::uint64_t>> positions;
  for (std::uint64_t i = 0; i < trace.accesses.size(); ++i) {
    positions[trace.accesses[i].gaussian].push_back(i);
  }
  const auto next_position = [&](std::uint32_t gaussian, std::uint64_t after) {
    const std::vector<std::uint64_t>& p = positions.at(gaussian);
    const auto it = std::upper_bound(p.begin(), p.end(), after);
    return it == p.end() ? kNoNextUse : trace.accesses[*it].tile;
  };

  std::set<std::pair<std::uint64_t, std::uint32_t>, VictimOrder> order;
  std::unordered_map<std::uint32_t, std::uint64_t> resident;  // gaussian -> next position
  resident.reserve(lines);

  for (std::uint64_t i = 0; i < trace.accesses.size(); ++i) {
    const std::uint32_t g = trace.accesses[i].gaussian;
    ++s.accesses;
    const auto it = resident.find(g);
    const std::uint64_t next = next_position(g, i);
    if (it != resident.end()) {
      ++s.hits;
      order.erase({it->second, g});
      it->second = next;
      order.insert({next, g});
      continue;
    }
    ++s.misses;
    if (resident.size() == lines) {
      const auto victim = std::prev(order.end());
      resident.erase(victim->second);
      order.erase(victim);
      ++s.evictions;
    }
    resident.emplace(g, next);
    order.insert({next, g});
  }
  s.bytes_read = s.misses * config.line_bytes;
  return s;
}

}  // namespace

CacheStats simulate(const CacheTrace& trace, const CacheConfig& config) {
  if (config.policy != CachePolicy::kNone && config.lines() < 1) {
    throw DataError("cache capacity must hold at least one line");
  }
  switch (config.policy) {
    case CachePolicy::kNone: return simulate_none(trace, config);
    case CachePolicy::kLru: return simulate_lru(trace, config);
    case CachePolicy::kOptOracle: return simulate_opt(trace, config);
    case CachePolicy::kReuseDistance: return simulate_rd(trace, config);
  }
  throw DataError("unknown cache policy");
}

std::vector<SweepPoint> sweep_hit_rate(const CacheTrace& trace,
                                       const std::vector<std::size_t>& capacities,
                                       const CacheConfig& base) {
  std::vector<SweepPoint> curve;
  curve.reserve(capacities.size());
  for (const std::size_t capacity : capacities) {
    CacheConfig config = base;
    config.capacity_bytes = capacity;
    const CacheStats stats = simulate(trace, config);
    curve.push_back({capacity, config.policy, stats.hit_rate()});
  }
  return curve;
}

void save_trace_csv(const CacheTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open trace file for writing: " + path);
  }
  out << "tile_ordinal,splat_index\n";
  for (const CacheAccess& a : trace.accesses) {
    out << a.tile << "," << a.gaussian << "\n";
  }
}

CacheTrace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open trace file: " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line != "tile_ordinal,splat_index") {
    throw FormatError("bad trace CSV header (want tile_ordinal,splat_index)");
  }
  CacheTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    CacheAccess a;
    char comma = 0;
    if (!(ls >> a.tile >> comma >> a.gaussian) || comma != ',') {
      throw FormatError("bad trace CSV row at line " + std::to_string(line_no));
    }
    trace.accesses.push_back(a);
  }
  return trace;
}

}  // namespace rowsplat
