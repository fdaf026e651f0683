#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pcot/memalloc.hpp"
#include "pcot/prdg.hpp"
#include "pcot/tiler.hpp"

namespace pcot {

struct TraceEvent {
  std::uint64_t addr = 0;  // byte address
  std::uint32_t array = 0;
  std::uint8_t kind = 0;  // 0 = read, 1 = write
};

/// Receives batches of memory events in program order.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_batch(const TraceEvent* ev, std::size_t n) = 0;
};

/// Streams the batches to a file: 8-byte magic "PCOTTRC1", then 13 bytes per
/// event (kind u8, array u32 LE, addr u64 LE).
class FileTraceSink : public TraceSink {
 public:
  explicit FileTraceSink(const std::string& path);
  ~FileTraceSink() override;
  void on_batch(const TraceEvent* ev, std::size_t n) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ExecOptions {
  bool check_oracle = true;
  TraceSink* sink = nullptr;
};

struct ExecResult {
  std::uint64_t points = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  bool violation = false;
  std::string violation_msg;  // first violation only
  std::uint64_t checksum = 0;  // FNV-1a over output array bytes
};

/// Deterministic input values shared with emitted code: splitmix of the
/// array-name hash and the flat cell index, scaled into [0, 1).
double init_value(const std::string& array, std::uint64_t flat);
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Interprets an embedded kernel under a set of memory maps. Loop bounds come
/// from per-depth projections of each statement domain, so leaves only pay for
/// the points they contain.
class Executor {
 public:
  Executor(const Prdg& embedded, const IntVec& params, const std::vector<MemoryMap>& maps);
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  /// Execute every leaf of the order in sequence. Storage persists across
  /// calls; reset() reinitializes it.
  ExecResult run(const TileOrder& order, const ExecOptions& opts = {});
  /// Single leaf covering the whole band bounding box.
  ExecResult run_untiled(const ExecOptions& opts = {});

  void reset();
  const std::vector<double>& array_data(const std::string& array) const;
  std::uint64_t array_base(const std::string& array) const;  // 64-byte aligned

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pcot
