#include "pcot/domain.hpp"

#include <algorithm>
#include <set>

namespace pcot {

std::int64_t eval_row(const IntVec& row, const IntVec& x, const IntVec& p) {
  if (row.size() != x.size() + p.size() + 1)
    fail(ErrorKind::DimMismatch, "eval_row: row length mismatch");
  std::int64_t s = row.back();
  for (std::size_t i = 0; i < x.size(); ++i) s = checked_add(s, checked_mul(row[i], x[i]));
  for (std::size_t j = 0; j < p.size(); ++j)
    s = checked_add(s, checked_mul(row[x.size() + j], p[j]));
  return s;
}

bool Domain::contains(const IntVec& x, const IntVec& p) const {
  if (x.size() != index_dim || p.size() != param_dim)
    fail(ErrorKind::DimMismatch, "Domain::contains: dimension mismatch");
  for (const auto& r : rows)
    if (eval_row(r, x, p) < 0) return false;
  return true;
}

namespace {

// Divide by the gcd of all entries; drop rows that hold trivially.
// Returns false (and leaves `out` untouched) for rows with no content.
bool normalize_row(IntVec& row) {
  std::int64_t g = 0;
  for (auto c : row) g = gcd64(g, c);
  if (g > 1)
    for (auto& c : row) c /= g;
  bool all_zero_coeffs = true;
  for (std::size_t i = 0; i + 1 < row.size(); ++i)
    if (row[i] != 0) all_zero_coeffs = false;
  // Trivially true constant row carries no information.
  return !(all_zero_coeffs && row.back() >= 0);
}

// Sort, drop duplicates, and keep only the tightest constant among rows with
// identical coefficients (larger constants are weaker for `row >= 0`).
std::vector<IntVec> dedupe(std::vector<IntVec> rows) {
  std::sort(rows.begin(), rows.end());
  std::vector<IntVec> out;
  for (auto& r : rows) {
    if (!out.empty() && std::equal(r.begin(), r.end() - 1, out.back().begin()))
      continue;  // same coefficients; the earlier row has the smaller constant
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<IntVec> fm_eliminate_column(const std::vector<IntVec>& rows,
                                        std::size_t col, std::size_t width) {
  for (const auto& r : rows)
    if (r.size() != width) fail(ErrorKind::DimMismatch, "fm_eliminate_column: row width");

  // An equality pair {r, -r} with a unit coefficient on `col` pins the column
  // to an affine function of the rest; substituting it is exact and avoids
  // the quadratic pairing growth.
  for (const auto& r : rows) {
    if (r[col] != 1 && r[col] != -1) continue;
    IntVec negr(width);
    for (std::size_t i = 0; i < width; ++i) negr[i] = -r[i];
    if (std::find(rows.begin(), rows.end(), negr) == rows.end()) continue;
    IntVec e = r;
    if (e[col] < 0)
      for (auto& c : e) c = -c;  // e: col + g == 0, so col = -g
    std::vector<IntVec> out;
    for (const auto& s : rows) {
      if (s == r || s == negr) continue;
      IntVec t = s;
      if (t[col] != 0) {
        std::int64_t k = t[col];
        for (std::size_t i = 0; i < width; ++i)
          t[i] = checked_sub(t[i], checked_mul(k, e[i]));
      }
      if (normalize_row(t)) out.push_back(std::move(t));
    }
    return dedupe(std::move(out));
  }

  std::vector<IntVec> pos, neg, out;
  for (const auto& r : rows) {
    if (r[col] > 0) pos.push_back(r);
    else if (r[col] < 0) neg.push_back(r);
    else out.push_back(r);
  }
  for (const auto& lo : pos) {
    for (const auto& hi : neg) {
      // lo[col] > 0, hi[col] < 0: lo[col]*hi + (-hi[col])*lo cancels col.
      IntVec r(width);
      for (std::size_t i = 0; i < width; ++i)
        r[i] = checked_add(checked_mul(lo[col], hi[i]), checked_mul(-hi[col], lo[i]));
      if (normalize_row(r)) out.push_back(std::move(r));
    }
  }
  for (auto& r : out) r[col] = 0;
  return dedupe(std::move(out));
}

Domain bind_params(const Domain& d, const IntVec& params) {
  if (params.size() != d.param_dim)
    fail(ErrorKind::DimMismatch, "bind_params: parameter count mismatch");
  Domain r;
  r.index_dim = d.index_dim;
  r.param_dim = 0;
  for (const auto& row : d.rows) {
    IntVec nr(d.index_dim + 1);
    std::int64_t c = row.back();
    for (std::size_t j = 0; j < d.param_dim; ++j)
      c = checked_add(c, checked_mul(row[d.index_dim + j], params[j]));
    for (std::size_t i = 0; i < d.index_dim; ++i) nr[i] = row[i];
    nr.back() = c;
    if (normalize_row(nr)) r.rows.push_back(std::move(nr));
  }
  return r;
}

Domain intersect(const Domain& a, const Domain& b) {
  if (a.index_dim != b.index_dim || a.param_dim != b.param_dim)
    fail(ErrorKind::DimMismatch, "intersect: shape mismatch");
  Domain r = a;
  r.rows.insert(r.rows.end(), b.rows.begin(), b.rows.end());
  return r;
}

Domain fm_project(const Domain& d, const std::vector<std::size_t>& eliminate) {
  for (auto p : eliminate)
    if (p >= d.index_dim) fail(ErrorKind::DimMismatch, "fm_project: bad position");
  std::vector<IntVec> rows = d.rows;
  const std::size_t width = d.row_len();
  for (auto p : eliminate) rows = fm_eliminate_column(rows, p, width);

  // Compact away the eliminated columns, preserving the order of the rest.
  std::vector<bool> gone(d.index_dim, false);
  for (auto p : eliminate) gone[p] = true;
  Domain r;
  r.index_dim = d.index_dim - eliminate.size();
  r.param_dim = d.param_dim;
  for (const auto& row : rows) {
    IntVec nr;
    nr.reserve(r.row_len());
    for (std::size_t i = 0; i < d.index_dim; ++i)
      if (!gone[i]) nr.push_back(row[i]);
    for (std::size_t j = d.index_dim; j < width; ++j) nr.push_back(row[j]);
    r.rows.push_back(std::move(nr));
  }
  return r;
}

bool is_empty_rational(const Domain& d, const IntVec& params) {
  Domain b = d.param_dim ? bind_params(d, params) : d;
  std::vector<IntVec> rows = b.rows;
  const std::size_t width = b.index_dim + 1;
  for (std::size_t col = 0; col < b.index_dim; ++col) {
    for (const auto& r : rows) {
      bool zero_coeffs = true;
      for (std::size_t i = 0; i < b.index_dim; ++i)
        if (r[i] != 0) zero_coeffs = false;
      if (zero_coeffs && r.back() < 0) return true;
    }
    rows = fm_eliminate_column(rows, col, width);
  }
  for (const auto& r : rows)
    if (r.back() < 0) return true;
  return false;
}

OrthantBox bounding_box(const Domain& d, const IntVec& params) {
  Domain b = d.param_dim ? bind_params(d, params) : d;
  if (is_empty_rational(b, {}))
    fail(ErrorKind::Validation, "bounding_box: empty domain");
  OrthantBox box;
  box.origin.resize(b.index_dim);
  box.size.resize(b.index_dim);
  const std::size_t width = b.index_dim + 1;
  for (std::size_t dim = 0; dim < b.index_dim; ++dim) {
    std::vector<IntVec> rows = b.rows;
    for (std::size_t col = 0; col < b.index_dim; ++col)
      if (col != dim) rows = fm_eliminate_column(rows, col, width);
    bool has_lb = false, has_ub = false;
    std::int64_t lb = 0, ub = 0;
    for (const auto& r : rows) {
      std::int64_t a = r[dim], c = r.back();
      if (a > 0) {
        std::int64_t cand = ceil_div(-c, a);
        if (!has_lb || cand > lb) lb = cand;
        has_lb = true;
      } else if (a < 0) {
        std::int64_t cand = floor_div(-c, a);
        if (!has_ub || cand < ub) ub = cand;
        has_ub = true;
      }
    }
    if (!has_lb || !has_ub)
      fail(ErrorKind::Unbounded, "bounding_box: dimension " + std::to_string(dim) +
                                     " is unbounded");
    if (ub < lb) fail(ErrorKind::Validation, "bounding_box: empty projection");
    box.origin[dim] = lb;
    box.size[dim] = checked_add(checked_sub(ub, lb), 1);
  }
  return box;
}

Domain domain_from_box(const OrthantBox& box, std::size_t param_dim) {
  Domain d;
  d.index_dim = box.dim();
  d.param_dim = param_dim;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    IntVec lo(d.row_len(), 0), hi(d.row_len(), 0);
    lo[i] = 1;
    lo.back() = checked_sub(0, box.origin[i]);
    hi[i] = -1;
    hi.back() = checked_sub(checked_add(box.origin[i], box.size[i]), 1);
    d.rows.push_back(std::move(lo));
    d.rows.push_back(std::move(hi));
  }
  return d;
}

Domain extend_indices(const Domain& d, std::size_t new_dim) {
  if (new_dim < d.index_dim) fail(ErrorKind::DimMismatch, "extend_indices: shrinking");
  Domain r;
  r.index_dim = new_dim;
  r.param_dim = d.param_dim;
  for (const auto& row : d.rows) {
    IntVec nr(r.row_len(), 0);
    for (std::size_t i = 0; i < d.index_dim; ++i) nr[i] = row[i];
    for (std::size_t j = 0; j <= d.param_dim; ++j)
      nr[new_dim + j] = row[d.index_dim + j];
    r.rows.push_back(std::move(nr));
  }
  return r;
}

}  // namespace pcot
