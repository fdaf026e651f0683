#include "pcot/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "pcot/exec.hpp"
#include "pcot/memalloc.hpp"

namespace pcot {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Untiled: return "untiled";
    case Scheme::Slt: return "slt";
    case Scheme::Cot: return "cot";
  }
  return "?";
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

SweepResult run_sweep(const Prdg& p, const IntVec& params, const SweepSpec& spec) {
  SweepResult res;
  res.kernel = p.name;
  res.params = params;
  res.cache = cache_spec_string(spec.cache);

  Prdg exe;
  std::vector<MemoryMap> maps;
  if (spec.use_alloc) {
    AllocResult ar = allocate(p, params);
    exe = std::move(ar.transformed);
    maps = std::move(ar.maps);
  } else {
    exe = p.is_perfect() ? p : embed(p);
    maps = single_assignment_maps(exe, params);
  }

  for (Scheme s : spec.schemes) {
    if (s == Scheme::Untiled) {
      SweepCell c;
      c.scheme = s;
      c.oca.resize(1);
      res.cells.push_back(std::move(c));
      continue;
    }
    for (const auto& t : spec.tiles) {
      SweepCell c;
      c.scheme = s;
      c.leaf = t.leaf;
      c.oca.resize(s == Scheme::Cot ? std::size_t(std::max(1, spec.wavefront_samples)) : 1);
      res.cells.push_back(std::move(c));
    }
  }

  struct Item {
    std::size_t cell;
    std::size_t sample;
  };
  std::vector<Item> items;
  for (std::size_t ci = 0; ci < res.cells.size(); ++ci)
    for (std::size_t si = 0; si < res.cells[ci].oca.size(); ++si) items.push_back({ci, si});

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::string error_msg;
  std::mutex error_mu;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= items.size()) return;
      SweepCell& c = res.cells[items[i].cell];
      try {
        TileOrder order;
        if (c.scheme == Scheme::Slt) {
          order = slt_order(exe, params, TileSpec{c.leaf});
        } else if (c.scheme == Scheme::Cot) {
          // Sample 0 is the canonical sequential divide-and-conquer order;
          // further samples measure random wavefront linearizations.
          order = cot_order(exe, params, TileSpec{c.leaf});
          if (items[i].sample > 0) {
            std::uint64_t s =
                mix(spec.seed ^ mix(items[i].cell * 1315423911ULL + items[i].sample));
            order = linearize_wavefront(assign_wavefront_phases(order), s);
          }
        }
        if (items[i].sample == 0 && c.scheme != Scheme::Untiled) {
          c.leaf_count = order.leaves.size();
          c.nodes_visited = order.nodes_visited;
        }
        CacheSim sim(spec.cache);
        Executor ex(exe, params, maps);
        ExecOptions opts;
        opts.check_oracle = false;
        opts.sink = &sim;
        ExecResult r = c.scheme == Scheme::Untiled ? ex.run_untiled(opts) : ex.run(order, opts);
        if (items[i].sample == 0 && c.scheme == Scheme::Untiled) c.leaf_count = 1;
        (void)r;
        c.oca[items[i].sample] = sim.stats().oca();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lk(error_mu);
        if (!failed.exchange(true)) error_msg = e.what();
      }
    }
  };

  int jobs = std::max(1, spec.jobs);
  if (jobs == 1 || items.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) fail(ErrorKind::Validation, "sweep failed: " + error_msg);

  for (auto& c : res.cells) {
    double sum = 0;
    for (auto v : c.oca) sum += double(v);
    c.mean = sum / double(c.oca.size());
    double var = 0;
    for (auto v : c.oca) var += (double(v) - c.mean) * (double(v) - c.mean);
    c.stddev = std::sqrt(var / double(c.oca.size()));
    c.cov = c.mean > 0 ? c.stddev / c.mean : 0.0;
  }
  return res;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "scheme,tile,samples,leaf_count,nodes_visited,oca_mean,oca_stddev,oca_cov\n";
  for (const auto& c : r.cells) {
    os << scheme_name(c.scheme) << ",";
    if (c.leaf.empty()) {
      os << "-";
    } else {
      for (std::size_t i = 0; i < c.leaf.size(); ++i) os << (i ? "x" : "") << c.leaf[i];
    }
    os << "," << c.oca.size() << "," << c.leaf_count << "," << c.nodes_visited << ",";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f,%.3f,%.6f", c.mean, c.stddev, c.cov);
    os << buf << "\n";
  }
  return os.str();
}

}  // namespace pcot
