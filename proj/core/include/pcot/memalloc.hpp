#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcot/prdg.hpp"

namespace pcot {

/// Mapping from logical array cells to storage cells:
///   phys_k = (map(cell)_k mod moduli_k) with moduli_k = 0 meaning no modulo;
/// the result lies in [0, extents_k) for every cell a run may touch.
struct MemoryMap {
  std::string array;
  IntAffineFn map;
  IntVec moduli;
  IntVec extents;
  bool single_assignment = false;

  IntVec apply(const IntVec& cell) const {
    IntVec c = apply_affine(map, cell);
    for (std::size_t k = 0; k < c.size(); ++k)
      if (moduli[k] > 0) c[k] = ((c[k] % moduli[k]) + moduli[k]) % moduli[k];
    return c;
  }

  std::int64_t words() const {
    std::int64_t w = 1;
    for (auto e : extents) w = checked_mul(w, e);
    return w;
  }
};

struct UovResult {
  IntVec vector;
  bool valid = false;
  std::string witness;  // derivation trace: search order, bound, validity proof
};

/// Bounded breadth-first search for the smallest universal occupancy vector
/// (by L1 norm, then lexicographic) over non-negative integer combinations of
/// the dependence vectors.
UovResult find_uov(const std::vector<IntVec>& deps, int max_terms = 12);

enum class EdgeClass { Uniform, UniformInContext, TrulyAffine };

/// Constant value of z - f(z) over the edge context, when it exists.
std::optional<IntVec> uniform_in_context(const PrdgEdge& e, const IntVec& params);

struct EdgeClassReport {
  std::string src, dst;
  EdgeClass cls = EdgeClass::Uniform;
  IntVec offset;  // set for Uniform / UniformInContext
};

struct ArrayAllocReport {
  std::string array;
  bool is_copy = false;
  bool single_assignment = false;
  UovResult uov;  // meaningful when !single_assignment
  std::int64_t words = 0;
};

struct AllocResult {
  Prdg transformed;              // embedded, with copy statements and
                                 // truly-affine reads re-targeted
  std::vector<MemoryMap> maps;   // one per array of `transformed`
  std::vector<EdgeClassReport> edge_classes;  // per original edge
  std::vector<ArrayAllocReport> arrays;       // temp + copy arrays
  std::size_t copy_statements = 0;
  std::int64_t footprint_alloc = 0;   // temp + copy words under `maps`
  std::int64_t footprint_single = 0;  // original temp arrays fully expanded

  const MemoryMap* map_for(const std::string& array) const {
    for (const auto& m : maps)
      if (m.array == array) return &m;
    return nullptr;
  }
};

/// Schedule-independent allocation pipeline: embed, classify,
/// affine-split, UOV-allocate original temps, single-assignment copies.
AllocResult allocate(const Prdg& p, const IntVec& params);

/// Identity maps sized by the declared extents at the given params.
std::vector<MemoryMap> single_assignment_maps(const Prdg& p, const IntVec& params);

/// Sum of extent products over the given maps.
std::int64_t footprint(const std::vector<MemoryMap>& maps);

}  // namespace pcot
