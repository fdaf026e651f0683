#include <benchmark/benchmark.h>

#include "pcot/cachesim.hpp"
#include "pcot/exec.hpp"
#include "pcot/kernel_io.hpp"
#include "pcot/memalloc.hpp"
#include "pcot/tiler.hpp"

#ifndef PCOT_KERNELS_DIR
#define PCOT_KERNELS_DIR "kernels"
#endif

using namespace pcot;

namespace {

Prdg load(const std::string& name) {
  return parse_kernel_file(std::string(PCOT_KERNELS_DIR) + "/" + name + ".kernel");
}

void BM_cachesim_access(benchmark::State& state) {
  CacheSim sim(parse_cache_spec("l1l2"));
  std::uint64_t addr = 0;
  for (auto _ : state) {
    sim.access(addr);
    addr = addr * 2862933555777941757ULL + 3037000493ULL;  // LCG walk
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_cachesim_access);

void BM_cot_order(benchmark::State& state) {
  Prdg p = embed(load("heat2d"));
  IntVec params{16, 64};
  TileSpec t{{4, 8, 8}};
  for (auto _ : state) benchmark::DoNotOptimize(cot_order(p, params, t));
}
BENCHMARK(BM_cot_order);

void BM_slt_order(benchmark::State& state) {
  Prdg p = embed(load("heat2d"));
  IntVec params{16, 64};
  TileSpec t{{4, 8, 8}};
  for (auto _ : state) benchmark::DoNotOptimize(slt_order(p, params, t));
}
BENCHMARK(BM_slt_order);

void BM_executor_untiled(benchmark::State& state) {
  Prdg p = embed(load("heat2d"));
  IntVec params{8, 32};
  auto maps = single_assignment_maps(p, params);
  ExecOptions opts;
  opts.check_oracle = false;
  std::uint64_t points = 0;
  for (auto _ : state) {
    Executor ex(p, params, maps);
    points = ex.run_untiled(opts).points;
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(points));
}
BENCHMARK(BM_executor_untiled);

void BM_executor_cot_oracle(benchmark::State& state) {
  Prdg p = embed(load("heat2d"));
  IntVec params{8, 32};
  auto maps = single_assignment_maps(p, params);
  TileOrder order = cot_order(p, params, TileSpec{{4, 8, 8}});
  std::uint64_t points = 0;
  for (auto _ : state) {
    Executor ex(p, params, maps);
    points = ex.run(order).points;
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(points));
}
BENCHMARK(BM_executor_cot_oracle);

void BM_allocate(benchmark::State& state) {
  Prdg p = load("heat1d-fig7");
  for (auto _ : state) benchmark::DoNotOptimize(allocate(p, {32, 32}));
}
BENCHMARK(BM_allocate);

}  // namespace

BENCHMARK_MAIN();
