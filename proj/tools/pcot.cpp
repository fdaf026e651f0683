// pcot: command-line front end for the polyhedral cache-oblivious tiling
// toolkit. Subcommands: run, sweep, alloc, emit.
//
// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 oracle or runtime
// check failure, 5 kernel parse/validation error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pcot/cachesim.hpp"
#include "pcot/emit_c.hpp"
#include "pcot/exec.hpp"
#include "pcot/kernel_io.hpp"
#include "pcot/memalloc.hpp"
#include "pcot/sweep.hpp"
#include "pcot/tiler.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitOracle = 4;
constexpr int kExitKernel = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void usage_fail(const std::string& msg) { throw UsageError(msg); }

// ---------------------------------------------------------------------------
// Config file: `key = value` lines, `#` comments, optional `[section]`
// headers scoping keys to one subcommand. Flags win over config values.
struct Config {
  std::map<std::string, std::string> kv;  // "section.key" or "key"

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    auto it = kv.find(section + "." + key);
    if (it != kv.end()) return it->second;
    it = kv.find(key);
    if (it != kv.end()) return it->second;
    return std::nullopt;
  }
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Config load_config(const std::string& path, bool required) {
  Config cfg;
  std::ifstream in(path);
  if (!in) {
    if (required) pcot::fail(pcot::ErrorKind::Io, "cannot open config file " + path);
    return cfg;
  }
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      pcot::fail(pcot::ErrorKind::Parse,
                 path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    cfg.kv[section.empty() ? key : section + "." + key] = val;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Small parsers for flag values.

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::int64_t parse_i64(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(trim(s), &pos);
    if (pos != trim(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    usage_fail("bad " + what + " '" + s + "'");
  }
}

pcot::IntVec parse_tile(const std::string& s) {
  pcot::IntVec t;
  for (const auto& tok : split(s, ','))
    t.push_back(parse_i64(tok, "tile size"));
  for (auto v : t)
    if (v <= 0) usage_fail("tile sizes must be positive, got '" + s + "'");
  if (t.empty()) usage_fail("empty tile spec");
  return t;
}

// One dimension of a sweep grid: "8,16,32" or "10:50:10" (lo:hi:step).
std::vector<std::int64_t> parse_grid_dim(const std::string& s) {
  std::vector<std::int64_t> out;
  if (s.find(':') != std::string::npos) {
    auto parts = split(s, ':');
    if (parts.size() != 3) usage_fail("range must be lo:hi:step, got '" + s + "'");
    std::int64_t lo = parse_i64(parts[0], "range bound");
    std::int64_t hi = parse_i64(parts[1], "range bound");
    std::int64_t step = parse_i64(parts[2], "range step");
    if (step <= 0) usage_fail("range step must be positive in '" + s + "'");
    for (std::int64_t v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    for (const auto& tok : split(s, ',')) out.push_back(parse_i64(tok, "tile size"));
  }
  for (auto v : out)
    if (v <= 0) usage_fail("tile sizes must be positive in '" + s + "'");
  if (out.empty()) usage_fail("empty grid dimension '" + s + "'");
  return out;
}

// Grid spec: per-dimension specs joined with 'x'; the cross product is the
// cell set. "8,16,32x8,16,32" or a single spec reused for every dimension.
std::vector<pcot::IntVec> parse_grid(const std::string& s, std::size_t dims) {
  auto dim_specs = split(s, 'x');
  if (dim_specs.size() == 1 && dims > 1)
    dim_specs.assign(dims, dim_specs[0]);
  if (dim_specs.size() != dims)
    usage_fail("grid has " + std::to_string(dim_specs.size()) + " dimensions, band has " +
               std::to_string(dims));
  std::vector<std::vector<std::int64_t>> axes;
  for (const auto& d : dim_specs) axes.push_back(parse_grid_dim(d));
  std::vector<pcot::IntVec> cells{{}};
  for (const auto& axis : axes) {
    std::vector<pcot::IntVec> next;
    for (const auto& c : cells)
      for (auto v : axis) {
        pcot::IntVec n = c;
        n.push_back(v);
        next.push_back(std::move(n));
      }
    cells = std::move(next);
  }
  return cells;
}

pcot::IntVec bind_kernel_params(const pcot::Prdg& p, const std::vector<std::string>& kvs) {
  std::map<std::string, std::int64_t> vals;
  for (const auto& arg : kvs)
    for (const auto& one : split(arg, ',')) {
      auto eq = one.find('=');
      if (eq == std::string::npos) usage_fail("expected NAME=VALUE, got '" + one + "'");
      vals[trim(one.substr(0, eq))] = parse_i64(one.substr(eq + 1), "parameter value");
    }
  pcot::IntVec out;
  for (const auto& name : p.params) {
    auto it = vals.find(name);
    if (it == vals.end()) usage_fail("kernel parameter " + name + " not set (use -p " + name + "=V)");
    out.push_back(it->second);
    vals.erase(it);
  }
  if (!vals.empty()) usage_fail("unknown kernel parameter " + vals.begin()->first);
  return out;
}

std::string params_string(const pcot::Prdg& p, const pcot::IntVec& params) {
  std::string s;
  for (std::size_t i = 0; i < p.params.size(); ++i)
    s += (i ? ";" : "") + p.params[i] + "=" + std::to_string(params[i]);
  return s;
}

std::string tile_string(const pcot::IntVec& t) {
  if (t.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i)
    s += (i ? "x" : "") + std::to_string(t[i]);
  return s;
}

pcot::Prdg load_kernel(const std::string& arg) {
  std::string path = pcot::find_kernel_file(arg);
  if (path.empty()) pcot::fail(pcot::ErrorKind::Io, "kernel not found: " + arg);
  return pcot::parse_kernel_file(path);
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) pcot::fail(pcot::ErrorKind::Io, "cannot write " + tmp);
    out << content;
    if (!out) pcot::fail(pcot::ErrorKind::Io, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) pcot::fail(pcot::ErrorKind::Io, "cannot rename " + tmp + " to " + path);
}

/// Forwards each batch to every registered sink.
struct TeeSink : pcot::TraceSink {
  std::vector<pcot::TraceSink*> sinks;
  void on_batch(const pcot::TraceEvent* ev, std::size_t n) override {
    for (auto* s : sinks) s->on_batch(ev, n);
  }
};

// ---------------------------------------------------------------------------

struct CommonArgs {
  std::string kernel;
  std::vector<std::string> params;
};

int cmd_run(const CommonArgs& common, const std::string& scheme_s, const std::string& tile_s,
            const std::string& cache_s, const std::string& trace_path,
            const std::string& csv_path, const std::string& order_path, bool use_alloc,
            bool wavefront, std::uint64_t seed, bool no_check) {
  pcot::Prdg p = load_kernel(common.kernel);
  pcot::IntVec params = bind_kernel_params(p, common.params);

  pcot::Scheme scheme;
  if (scheme_s == "untiled") scheme = pcot::Scheme::Untiled;
  else if (scheme_s == "slt") scheme = pcot::Scheme::Slt;
  else if (scheme_s == "cot") scheme = pcot::Scheme::Cot;
  else usage_fail("unknown scheme '" + scheme_s + "' (untiled|slt|cot)");

  pcot::Prdg e;
  std::vector<pcot::MemoryMap> maps;
  if (use_alloc) {
    pcot::AllocResult ar = pcot::allocate(p, params);
    e = std::move(ar.transformed);
    maps = std::move(ar.maps);
  } else {
    e = p.is_perfect() ? p : pcot::embed(p);
    maps = pcot::single_assignment_maps(e, params);
  }

  pcot::TileOrder order;
  if (scheme == pcot::Scheme::Untiled) {
    if (!tile_s.empty()) usage_fail("--tile has no effect with --scheme untiled");
  } else {
    if (tile_s.empty()) usage_fail("--tile is required for slt/cot");
    pcot::IntVec tile = parse_tile(tile_s);
    if (tile.size() != e.tilable_band.size())
      usage_fail("tile has " + std::to_string(tile.size()) + " sizes, band has " +
                 std::to_string(e.tilable_band.size()));
    if (scheme == pcot::Scheme::Slt) {
      order = pcot::slt_order(e, params, pcot::TileSpec{tile});
    } else {
      order = pcot::assign_wavefront_phases(pcot::cot_order(e, params, pcot::TileSpec{tile}));
      if (wavefront) order = pcot::linearize_wavefront(order, seed);
    }
  }

  pcot::CacheSim sim(pcot::parse_cache_spec(cache_s));
  std::unique_ptr<pcot::FileTraceSink> file_sink;
  TeeSink tee;
  tee.sinks.push_back(&sim);
  if (!trace_path.empty()) {
    file_sink = std::make_unique<pcot::FileTraceSink>(trace_path);
    tee.sinks.push_back(file_sink.get());
  }

  pcot::Executor ex(e, params, maps);
  pcot::ExecOptions opts;
  opts.check_oracle = !no_check;
  opts.sink = &tee;
  pcot::ExecResult r =
      scheme == pcot::Scheme::Untiled ? ex.run_untiled(opts) : ex.run(order, opts);

  if (!order_path.empty()) atomic_write(order_path, pcot::dump_order(order));

  std::printf("kernel %s\n", p.name.c_str());
  std::printf("params %s\n", params_string(p, params).c_str());
  std::printf("scheme %s\n", scheme_s.c_str());
  std::printf("tile %s\n", scheme == pcot::Scheme::Untiled
                               ? "-"
                               : tile_string(parse_tile(tile_s)).c_str());
  std::printf("points %llu\n", (unsigned long long)r.points);
  std::printf("reads %llu\n", (unsigned long long)r.reads);
  std::printf("writes %llu\n", (unsigned long long)r.writes);
  std::size_t leaves = scheme == pcot::Scheme::Untiled ? 1 : order.leaves.size();
  std::printf("leaves %zu\n", leaves);
  std::printf("nodes %zu\n", scheme == pcot::Scheme::Cot ? order.nodes_visited : leaves);
  std::printf("CHECKSUM %016llx\n", (unsigned long long)r.checksum);
  std::printf("cache %s\n", pcot::cache_spec_string(pcot::parse_cache_spec(cache_s)).c_str());
  const auto& st = sim.stats();
  for (std::size_t l = 0; l < st.levels.size(); ++l)
    std::printf("level %zu accesses %llu misses %llu\n", l,
                (unsigned long long)st.levels[l].accesses,
                (unsigned long long)st.levels[l].misses);
  std::printf("OCA %llu\n", (unsigned long long)st.oca());

  if (r.violation) {
    std::fprintf(stderr, "oracle: %s\n", r.violation_msg.c_str());
    return kExitOracle;
  }

  if (!csv_path.empty()) {
    std::ostringstream csv;
    csv << "kernel,params,scheme,tile,points,leaves,nodes,checksum,oca\n";
    char chk[32];
    std::snprintf(chk, sizeof chk, "%016llx", (unsigned long long)r.checksum);
    csv << p.name << "," << params_string(p, params) << "," << scheme_s << ","
        << (scheme == pcot::Scheme::Untiled ? std::string("-") : tile_string(parse_tile(tile_s)))
        << "," << r.points << "," << leaves << ","
        << (scheme == pcot::Scheme::Cot ? order.nodes_visited : leaves) << "," << chk << ","
        << st.oca() << "\n";
    atomic_write(csv_path, csv.str());
  }
  return kExitOk;
}

int cmd_sweep(const CommonArgs& common, const std::string& tiles_s,
              const std::string& schemes_s, const std::string& cache_s, int samples,
              std::uint64_t seed, int jobs, bool use_alloc, const std::string& csv_path) {
  pcot::Prdg p = load_kernel(common.kernel);
  pcot::IntVec params = bind_kernel_params(p, common.params);

  pcot::SweepSpec spec;
  spec.cache = pcot::parse_cache_spec(cache_s);
  spec.wavefront_samples = samples;
  spec.seed = seed;
  spec.jobs = jobs;
  spec.use_alloc = use_alloc;
  for (const auto& s : split(schemes_s, ',')) {
    if (s == "untiled") spec.schemes.push_back(pcot::Scheme::Untiled);
    else if (s == "slt") spec.schemes.push_back(pcot::Scheme::Slt);
    else if (s == "cot") spec.schemes.push_back(pcot::Scheme::Cot);
    else usage_fail("unknown scheme '" + s + "' in --schemes");
  }
  if (spec.schemes.empty()) usage_fail("--schemes is empty");
  bool needs_tiles = false;
  for (auto s : spec.schemes)
    if (s != pcot::Scheme::Untiled) needs_tiles = true;
  if (needs_tiles) {
    if (tiles_s.empty()) usage_fail("--tiles is required for slt/cot sweeps");
    for (auto& t : parse_grid(tiles_s, p.tilable_band.size()))
      spec.tiles.push_back(pcot::TileSpec{std::move(t)});
  }
  if (samples <= 0) usage_fail("--samples must be positive");

  pcot::SweepResult res = pcot::run_sweep(p, params, spec);
  std::string csv = pcot::sweep_csv(res);
  std::fputs(csv.c_str(), stdout);

  // Per-scheme summary pooled over every sample of every cell.
  for (auto sc : spec.schemes) {
    std::vector<double> xs;
    for (const auto& c : res.cells)
      if (c.scheme == sc)
        for (auto v : c.oca) xs.push_back(double(v));
    if (xs.empty()) continue;
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    double stddev = std::sqrt(var / double(xs.size()));
    std::printf("summary scheme=%s cells=%zu mean=%.1f stddev=%.3f cov=%.6f\n",
                pcot::scheme_name(sc), xs.size(), mean, stddev, mean > 0 ? stddev / mean : 0.0);
  }

  if (!csv_path.empty()) atomic_write(csv_path, csv);
  return kExitOk;
}

const char* edge_class_name(pcot::EdgeClass c) {
  switch (c) {
    case pcot::EdgeClass::Uniform: return "uniform";
    case pcot::EdgeClass::UniformInContext: return "uniform-in-context";
    case pcot::EdgeClass::TrulyAffine: return "truly-affine";
  }
  return "?";
}

int cmd_alloc(const CommonArgs& common, const std::string& csv_path) {
  pcot::Prdg p = load_kernel(common.kernel);
  pcot::IntVec params = bind_kernel_params(p, common.params);
  pcot::AllocResult ar = pcot::allocate(p, params);

  std::printf("kernel %s\n", p.name.c_str());
  std::printf("params %s\n", params_string(p, params).c_str());
  std::printf("edges:\n");
  for (const auto& ec : ar.edge_classes) {
    std::printf("  %s -> %s %s", ec.src.c_str(), ec.dst.c_str(), edge_class_name(ec.cls));
    if (ec.cls != pcot::EdgeClass::TrulyAffine) {
      std::printf(" offset=(");
      for (std::size_t i = 0; i < ec.offset.size(); ++i)
        std::printf("%s%lld", i ? "," : "", (long long)ec.offset[i]);
      std::printf(")");
    }
    std::printf("\n");
  }
  if (ar.copy_statements == 0)
    std::printf("no split performed\n");
  else
    std::printf("affine split: %zu copy statements\n", ar.copy_statements);

  std::printf("arrays:\n");
  for (const auto& a : ar.arrays) {
    const pcot::MemoryMap* m = ar.map_for(a.array);
    std::printf("  %-16s %s", a.array.c_str(),
                a.single_assignment ? "single-assignment" : "uov");
    if (!a.single_assignment) {
      std::printf("=(");
      for (std::size_t i = 0; i < a.uov.vector.size(); ++i)
        std::printf("%s%lld", i ? "," : "", (long long)a.uov.vector[i]);
      std::printf(")");
    }
    if (a.is_copy) std::printf(" copy");
    if (m) {
      std::printf(" extents=");
      for (std::size_t i = 0; i < m->extents.size(); ++i)
        std::printf("%s%lld", i ? "x" : "", (long long)m->extents[i]);
    }
    std::printf(" words=%lld\n", (long long)a.words);
  }
  std::printf("footprint %lld\n", (long long)ar.footprint_alloc);
  std::printf("single-assignment footprint %lld\n", (long long)ar.footprint_single);
  if (ar.footprint_alloc > 0)
    std::printf("reduction %.1fx\n",
                double(ar.footprint_single) / double(ar.footprint_alloc));

  if (!csv_path.empty()) {
    std::ostringstream csv;
    csv << "array,copy,storage,uov,words\n";
    for (const auto& a : ar.arrays) {
      csv << a.array << "," << (a.is_copy ? 1 : 0) << ","
          << (a.single_assignment ? "single" : "uov") << ",";
      if (!a.single_assignment) {
        for (std::size_t i = 0; i < a.uov.vector.size(); ++i)
          csv << (i ? ";" : "") << a.uov.vector[i];
      } else {
        csv << "-";
      }
      csv << "," << a.words << "\n";
    }
    atomic_write(csv_path, csv.str());
  }
  return kExitOk;
}

int cmd_emit(const CommonArgs& common, const std::string& outdir, const std::string& tile_s,
             bool tasks, bool use_alloc) {
  pcot::Prdg p = load_kernel(common.kernel);
  pcot::IntVec params = bind_kernel_params(p, common.params);
  pcot::EmitOptions eo;
  eo.openmp = tasks;
  eo.use_alloc = use_alloc;
  if (!tile_s.empty()) {
    eo.leaf_defaults = parse_tile(tile_s);
    if (eo.leaf_defaults.size() != p.tilable_band.size())
      usage_fail("--tile-defaults has " + std::to_string(eo.leaf_defaults.size()) +
                 " sizes, band has " + std::to_string(p.tilable_band.size()));
  }
  std::string src = pcot::emit_c(p, params, eo);

  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  std::string base = outdir + "/" + p.name;
  std::string c_path = base + ".c";
  std::string sh_path = base + ".build.sh";
  atomic_write(c_path, src);
  std::ostringstream sh;
  sh << "#!/bin/sh\n# Build the generated kernel; -ffp-contract=off keeps the\n"
     << "# floating-point result bit-identical to the reference interpreter.\n"
     << "exec ${CC:-cc} -std=c99 -O2 -ffp-contract=off" << (tasks ? " -fopenmp" : "") << " \\\n"
     << "  \"$(dirname \"$0\")/" << p.name << ".c\" -lm -o " << p.name << "\n";
  atomic_write(sh_path, sh.str());
  std::filesystem::permissions(sh_path,
                               std::filesystem::perms::owner_all |
                                   std::filesystem::perms::group_read |
                                   std::filesystem::perms::others_read,
                               ec);
  std::printf("wrote %s\n", c_path.c_str());
  std::printf("wrote %s\n", sh_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyhedral cache-oblivious tiling toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 usage error, 3 I/O error,\n"
      "            4 oracle/runtime check failure, 5 kernel parse/validation error.\n"
      "Kernels are looked up as paths, then in PCOT_KERNEL_PATH, then ./kernels.\n"
      "Config file (--config, default ./pcot.toml): `key = value` lines with\n"
      "optional [run]/[sweep]/[alloc]/[emit] sections; flags override config.");

  std::string config_path;
  app.add_option("--config", config_path, "Config file (default: ./pcot.toml if present)");

  CommonArgs common;
  std::string scheme = "cot", tile, cache = "l1l2", trace_path, csv_path, order_path;
  bool use_alloc = false, wavefront = false, no_check = false, tasks = false;
  std::uint64_t seed = 0;
  int samples = 3, jobs = 1;
  std::string tiles, schemes = "slt,cot", outdir = ".", tile_defaults;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("kernel", common.kernel, "Kernel name or path")->required();
    sub->add_option("-p,--param,--params", common.params,
                    "Kernel parameter NAME=VALUE (repeatable, comma-separable)");
  };

  CLI::App* run = app.add_subcommand("run", "Execute one kernel under one tile order");
  add_common(run);
  run->add_option("--scheme", scheme, "untiled|slt|cot (default cot)");
  run->add_option("--tile", tile, "Per-band-dimension leaf sizes, e.g. 8,32,32");
  run->add_option("--cache", cache, "Cache preset or SIZE:ASSOC:LINE[,...] (default l1l2)");
  run->add_option("--trace", trace_path, "Write the binary access trace to this file");
  run->add_option("--csv", csv_path, "Write a one-row CSV report to this file");
  run->add_option("--order", order_path, "Write the leaf-order text dump to this file");
  run->add_flag("--alloc", use_alloc, "Run under the reuse allocation");
  run->add_flag("--wavefront", wavefront, "Linearize COT leaves by wavefront phase");
  run->add_option("--seed", seed, "Wavefront tie-break seed (default 0)");
  run->add_flag("--no-check", no_check, "Disable the dependence oracle");

  CLI::App* sweep = app.add_subcommand("sweep", "Measure OCA over a tile-size grid");
  add_common(sweep);
  sweep->add_option("--tiles", tiles,
                    "Grid: per-dimension lists/ranges joined with 'x', e.g. 8,16,32x8:32:8");
  sweep->add_option("--schemes", schemes, "Comma list of untiled|slt|cot (default slt,cot)");
  sweep->add_option("--cache", cache, "Cache preset or spec (default l1l2)");
  sweep->add_option("--samples", samples, "Wavefront linearizations per COT cell (default 3)");
  sweep->add_option("--seed", seed, "Base seed for linearizations");
  sweep->add_option("--jobs", jobs, "Concurrent sweep cells (default 1)");
  sweep->add_flag("--alloc", use_alloc, "Sweep under the reuse allocation");
  sweep->add_option("--csv", csv_path, "Also write the CSV to this file");

  CLI::App* alloc = app.add_subcommand("alloc", "Report the schedule-independent allocation");
  add_common(alloc);
  alloc->add_option("--csv", csv_path, "Write the per-array CSV to this file");

  CLI::App* emit = app.add_subcommand("emit", "Write a standalone C99 bundle");
  add_common(emit);
  emit->add_option("-o,--outdir", outdir, "Output directory (default .)");
  emit->add_option("--tile-defaults", tile_defaults,
                   "Leaf sizes compiled in as the binary's default");
  emit->add_flag("--tasks", tasks, "Annotate the recursion with OpenMP task pragmas");
  emit->add_flag("--alloc", use_alloc, "Emit storage from the reuse allocation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    // Config fills in values the command line left at their defaults.
    Config cfg = load_config(config_path.empty() ? "pcot.toml" : config_path,
                             !config_path.empty());
    CLI::App* sub = app.get_subcommands().front();
    const std::string section = sub->get_name();
    auto unset = [&](const char* flag) {
      const CLI::Option* o = sub->get_option_no_throw(flag);
      return o != nullptr && o->count() == 0;
    };
    auto fill_str = [&](const char* flag, const char* key, std::string& var) {
      if (unset(flag))
        if (auto v = cfg.get(section, key)) var = *v;
    };
    auto fill_int = [&](const char* flag, const char* key, auto& var) {
      if (unset(flag))
        if (auto v = cfg.get(section, key))
          var = static_cast<std::decay_t<decltype(var)>>(parse_i64(*v, key));
    };
    auto fill_bool = [&](const char* flag, const char* key, bool& var) {
      if (unset(flag))
        if (auto v = cfg.get(section, key)) var = (*v == "true" || *v == "1");
    };
    fill_str("--scheme", "scheme", scheme);
    fill_str("--tile", "tile", tile);
    fill_str("--cache", "cache", cache);
    fill_str("--tiles", "tiles", tiles);
    fill_str("--schemes", "schemes", schemes);
    fill_str("--outdir", "outdir", outdir);
    fill_str("--tile-defaults", "tile-defaults", tile_defaults);
    fill_int("--samples", "samples", samples);
    fill_int("--seed", "seed", seed);
    fill_int("--jobs", "jobs", jobs);
    fill_bool("--alloc", "alloc", use_alloc);
    fill_bool("--tasks", "tasks", tasks);
    fill_bool("--wavefront", "wavefront", wavefront);

    if (sub == run)
      return cmd_run(common, scheme, tile, cache, trace_path, csv_path, order_path, use_alloc,
                     wavefront, seed, no_check);
    if (sub == sweep)
      return cmd_sweep(common, tiles, schemes, cache, samples, seed, jobs, use_alloc, csv_path);
    if (sub == alloc) return cmd_alloc(common, csv_path);
    if (sub == emit) return cmd_emit(common, outdir, tile_defaults, tasks, use_alloc);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const pcot::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.kind()) {
      case pcot::ErrorKind::Io: return kExitIo;
      default: return kExitKernel;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitKernel;
  }
}
