#pragma once

#include <string>

#include "pcot/prdg.hpp"

namespace pcot {

struct EmitOptions {
  bool openmp = false;    // annotate the recursion with task/taskwait pragmas
  bool use_alloc = false; // storage from the reuse allocation instead of
                          // single-assignment arrays
  IntVec leaf_defaults;   // per-band-dimension leaf size used when the
                          // generated binary gets no arguments (default 4)
};

/// Emit a standalone C99 translation unit specialized to the parameter
/// binding: a recursive divide-and-conquer driver over the tilable band with
/// runtime leaf sizes, a guarded base-case nest, and a main that initializes
/// inputs deterministically, runs, and prints CHECKSUM/NODES/LEAVES lines.
/// Compile with -ffp-contract=off to reproduce the interpreter bit for bit.
std::string emit_c(const Prdg& p, const IntVec& params, const EmitOptions& opts = {});

}  // namespace pcot
