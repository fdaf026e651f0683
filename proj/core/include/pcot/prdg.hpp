#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcot/domain.hpp"
#include "pcot/expr.hpp"

namespace pcot {

enum class ArrayKind { Input, Output, Temp };

struct ArrayDecl {
  std::string name;
  std::size_t rank = 0;
  std::vector<AffineExpr> extents;  // over params only (index coeffs zero)
  ArrayKind kind = ArrayKind::Temp;

  bool operator==(const ArrayDecl& o) const {
    return name == o.name && rank == o.rank && extents == o.extents && kind == o.kind;
  }
};

struct WriteRef {
  std::string array;
  std::vector<AffineExpr> subscripts;

  bool operator==(const WriteRef& o) const = default;
};

struct Statement {
  std::string id;
  std::size_t depth = 0;  // number of leading global indices this statement uses
  Domain domain;          // index_dim == depth
  WriteRef writes;
  ExprPtr body;

  bool operator==(const Statement& o) const {
    return id == o.id && depth == o.depth && domain == o.domain &&
           writes == o.writes && expr_equal(body, o.body);
  }
};

enum class EdgeKind { Flow, MemoryBased };

struct PrdgEdge {
  std::string src;  // consumer
  std::string dst;  // producer
  Domain context;   // subset of the consumer domain
  IntAffineFn fn;   // consumer point -> producer point
  EdgeKind kind = EdgeKind::Flow;

  bool operator==(const PrdgEdge& o) const {
    return src == o.src && dst == o.dst && context == o.context && fn == o.fn &&
           kind == o.kind;
  }
};

struct Prdg {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::string> indices;  // outermost first
  std::vector<ArrayDecl> arrays;
  std::vector<Statement> statements;
  std::vector<PrdgEdge> edges;
  std::vector<std::size_t> tilable_band;  // index positions
  IntVec check_params;  // parameter binding used for load-time sampled checks

  const Statement* find_statement(const std::string& id) const {
    for (const auto& s : statements)
      if (s.id == id) return &s;
    return nullptr;
  }

  const ArrayDecl* find_array(const std::string& name) const {
    for (const auto& a : arrays)
      if (a.name == name) return &a;
    return nullptr;
  }

  int array_index(const std::string& name) const {
    for (std::size_t i = 0; i < arrays.size(); ++i)
      if (arrays[i].name == name) return static_cast<int>(i);
    return -1;
  }

  ExprScope scope_at_depth(std::size_t depth) const {
    ExprScope s;
    s.indices.assign(indices.begin(), indices.begin() + depth);
    s.params = params;
    return s;
  }

  bool is_perfect() const {
    for (const auto& s : statements)
      if (s.depth != indices.size()) return false;
    return true;
  }

  bool operator==(const Prdg& o) const {
    return name == o.name && params == o.params && indices == o.indices &&
           arrays == o.arrays && statements == o.statements && edges == o.edges &&
           tilable_band == o.tilable_band && check_params == o.check_params;
  }
};

/// Every integer point of d at the given params, lexicographic order.
/// Throws Validation if the domain holds more than `cap` candidate points.
std::vector<IntVec> enumerate_points(const Domain& d, const IntVec& params,
                                     std::int64_t cap = 4'000'000);

/// Bring every statement to the full depth by appending unit-extent trailing
/// dimensions pinned to zero, with bodies, writes, and edges rewritten in
/// place. Instance sets are in bijection with the originals.
Prdg embed(const Prdg& p);

struct EdgeReport {
  std::string src, dst;
  EdgeKind kind = EdgeKind::Flow;
  std::size_t points = 0;          // enumerated context points
  IntVec min_component;            // per full-depth dimension
  IntVec max_component;
  bool flagged = false;            // negative component inside the tilable band
};

struct DependenceReport {
  std::vector<EdgeReport> edges;
  bool any_flagged = false;
};

/// Enumerates each flow edge's context and reports the per-dimension range of
/// dependence components (consumer minus producer, at full embedded depth).
DependenceReport check_dependences_sampled(const Prdg& p, const IntVec& params);

}  // namespace pcot
