#pragma once

#include <string>
#include <vector>

#include "pcot/orthant.hpp"
#include "pcot/prdg.hpp"

namespace pcot {

/// Per-dimension base-case thresholds for the tilable band.
struct TileSpec {
  IntVec leaf;
};

struct PaddedBox {
  OrthantBox box;  // size_i == leaf_i * 2^levels_i
  IntVec levels;
};

enum class Scheme { Untiled, Slt, Cot };

struct TileOrder {
  Scheme scheme = Scheme::Untiled;
  std::size_t band_dim = 0;
  OrthantBox band_box;                    // unpadded bounding box of the band
  std::vector<OrthantBox> leaves;         // visited in sequence order
  std::vector<std::vector<int>> paths;    // COT only: orthant index per level
  std::vector<std::vector<int>> phases;   // after assign_wavefront_phases
  std::size_t nodes_visited = 0;          // recursion nodes entered (COT)
};

struct TilerOpts {
  bool skip_zero_orthants = true;
  bool skip_empty_orthants = true;
};

/// Exact emptiness conditions for "band box intersect statement domain",
/// precomputed symbolically over the box origin/size so the tiler and the
/// emitted C code evaluate the identical test.
struct BoxEmptiness {
  std::size_t band_dim = 0;
  // Per statement: condition rows over (o_0..o_{d-1}, s_0..s_{d-1}, 1).
  // The intersection is nonempty iff every row evaluates >= 0.
  std::vector<std::vector<IntVec>> stmt_rows;

  bool stmt_nonempty(std::size_t stmt, const OrthantBox& box) const;
  bool empty(const OrthantBox& box) const;  // empty for every statement
};

/// p must be embedded; band is the leading band_dim dimensions.
BoxEmptiness make_box_emptiness(const Prdg& p, const IntVec& params);

PaddedBox pad_box(const OrthantBox& bb, const TileSpec& t);

/// 2^d children, lexicographic over orthant bits with dimension 0 most
/// significant. Dimensions at or below the leaf threshold contribute a full
/// first half and a zero-size second half.
std::vector<OrthantBox> split_orthants(const OrthantBox& box, const TileSpec& t);

/// Union bounding box of the statement domains projected onto the band.
OrthantBox band_bounding_box(const Prdg& p, const IntVec& params);

TileOrder cot_order(const Prdg& p, const IntVec& params, const TileSpec& t,
                    const TilerOpts& opts = {});
TileOrder slt_order(const Prdg& p, const IntVec& params, const TileSpec& t,
                    const TilerOpts& opts = {});

/// Wavefront phase of each recursion level is the bit-sum of the orthant
/// index; leaves sharing a full phase path are mutually unordered.
TileOrder assign_wavefront_phases(const TileOrder& order);

/// Reorder leaves into a valid wavefront linearization: lexicographic over
/// phase paths, with leaves sharing a full phase path shuffled by the seed.
TileOrder linearize_wavefront(const TileOrder& order, std::uint64_t seed);

/// One leaf per line: "origin=a,b size=c,d" plus "phase=..." when assigned.
std::string dump_order(const TileOrder& order);

}  // namespace pcot
