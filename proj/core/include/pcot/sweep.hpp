#pragma once

#include <string>
#include <vector>

#include "pcot/cachesim.hpp"
#include "pcot/tiler.hpp"

namespace pcot {

struct SweepSpec {
  std::vector<TileSpec> tiles;
  std::vector<Scheme> schemes;
  CacheConfig cache;
  int wavefront_samples = 1;  // COT linearizations measured per cell
  std::uint64_t seed = 0;
  int jobs = 1;
  bool use_alloc = false;  // run under the reuse allocation instead of
                           // single-assignment storage
};

struct SweepCell {
  Scheme scheme = Scheme::Untiled;
  IntVec leaf;  // empty for Untiled
  std::size_t leaf_count = 0;
  std::size_t nodes_visited = 0;
  std::vector<std::uint64_t> oca;  // one entry per sample
  double mean = 0.0;
  double stddev = 0.0;
  double cov = 0.0;  // stddev / mean, 0 when mean is 0
};

struct SweepResult {
  std::string kernel;
  IntVec params;
  std::string cache;
  std::vector<SweepCell> cells;
};

SweepResult run_sweep(const Prdg& p, const IntVec& params, const SweepSpec& spec);

const char* scheme_name(Scheme s);

/// CSV with header:
/// scheme,tile,samples,leaf_count,nodes_visited,oca_mean,oca_stddev,oca_cov
/// Tile sizes are joined with 'x'; untiled rows use '-'.
std::string sweep_csv(const SweepResult& r);

}  // namespace pcot
