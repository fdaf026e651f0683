#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcot/exec.hpp"

namespace pcot {

struct CacheLevelConfig {
  std::int64_t size_bytes = 0;
  int assoc = 0;
  int line_bytes = 64;
};

struct CacheConfig {
  std::vector<CacheLevelConfig> levels;  // innermost first
};

/// "SIZE:ASSOC:LINE[,SIZE:ASSOC:LINE...]" with k/m size suffixes, or a preset
/// name: tiny (4k:4:64), desk-llc (1m:16:64), l1 (32k:8:64),
/// l1l2 (l1 + 1m:16:64), l1l2l3 (l1l2 + 8m:16:64).
CacheConfig parse_cache_spec(const std::string& spec);
std::string cache_spec_string(const CacheConfig& c);

struct CacheLevelStats {
  std::uint64_t accesses = 0;
  std::uint64_t misses = 0;
};

struct CacheStats {
  std::vector<CacheLevelStats> levels;
  /// Off-chip accesses: misses of the outermost level.
  std::uint64_t oca() const { return levels.empty() ? 0 : levels.back().misses; }
};

/// Set-associative LRU hierarchy with allocate-on-miss for reads and writes.
/// A miss at level i is replayed at level i+1.
class CacheSim : public TraceSink {
 public:
  explicit CacheSim(const CacheConfig& cfg);

  void access(std::uint64_t addr);
  void on_batch(const TraceEvent* ev, std::size_t n) override;

  const CacheStats& stats() const { return stats_; }
  void reset();

 private:
  struct Level {
    std::uint64_t line = 64;
    std::uint64_t sets = 1;
    std::uint32_t assoc = 1;
    std::vector<std::uint64_t> tags;
    std::vector<std::uint64_t> stamps;
    std::uint64_t counter = 0;
  };
  std::vector<Level> levels_;
  CacheStats stats_;
};

}  // namespace pcot
