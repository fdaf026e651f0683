#pragma once

#include <cstddef>
#include <vector>

#include "pcot/affine.hpp"
#include "pcot/orthant.hpp"

namespace pcot {

/// Conjunction of integer affine inequalities row . (x ++ p ++ [1]) >= 0
/// over index variables x and parameters p.
struct Domain {
  std::size_t index_dim = 0;
  std::size_t param_dim = 0;
  std::vector<IntVec> rows;  // each of length index_dim + param_dim + 1

  std::size_t row_len() const { return index_dim + param_dim + 1; }

  bool contains(const IntVec& x, const IntVec& p) const;

  bool operator==(const Domain& o) const {
    return index_dim == o.index_dim && param_dim == o.param_dim && rows == o.rows;
  }
};

std::int64_t eval_row(const IntVec& row, const IntVec& x, const IntVec& p);

/// Substitute concrete parameter values; result has param_dim = 0.
Domain bind_params(const Domain& d, const IntVec& params);

/// Intersection of two domains over the same index/param spaces.
Domain intersect(const Domain& a, const Domain& b);

/// Fourier-Motzkin elimination of the given index positions. The result is
/// the rational shadow onto the remaining indices (kept in original order).
Domain fm_project(const Domain& d, const std::vector<std::size_t>& eliminate);

/// True only if the domain has no rational point once params are substituted.
bool is_empty_rational(const Domain& d, const IntVec& params);
inline bool is_empty_rational(const Domain& d) { return is_empty_rational(d, {}); }

/// Smallest integer box containing every integer point of d at the given
/// parameter binding. Fails with Unbounded/Validation on unbounded or empty d.
OrthantBox bounding_box(const Domain& d, const IntVec& params);

/// Domain {origin_i <= x_i < origin_i + size_i} over box.dim() indices.
Domain domain_from_box(const OrthantBox& box, std::size_t param_dim = 0);

/// Rows of d with extra zero index columns appended (index_dim -> new_dim).
Domain extend_indices(const Domain& d, std::size_t new_dim);

/// Raw FM step used by the parametric emptiness machinery: eliminate the
/// variable at column `col` from rows of width `width`; gcd-normalized.
std::vector<IntVec> fm_eliminate_column(const std::vector<IntVec>& rows,
                                        std::size_t col, std::size_t width);

}  // namespace pcot
