#pragma once

#include <cstdint>
#include <vector>

#include "pcot/checked.hpp"

namespace pcot {

/// Dense integer vector. Dimension is just size(); arithmetic is checked.
using IntVec = std::vector<std::int64_t>;

inline IntVec zeros(std::size_t n) { return IntVec(n, 0); }

inline std::int64_t dot(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) fail(ErrorKind::DimMismatch, "dot: dimension mismatch");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = checked_add(s, checked_mul(a[i], b[i]));
  return s;
}

inline IntVec vec_add(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) fail(ErrorKind::DimMismatch, "vec_add: dimension mismatch");
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_add(a[i], b[i]);
  return r;
}

inline IntVec vec_sub(const IntVec& a, const IntVec& b) {
  if (a.size() != b.size()) fail(ErrorKind::DimMismatch, "vec_sub: dimension mismatch");
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked_sub(a[i], b[i]);
  return r;
}

inline std::int64_t l1_norm(const IntVec& v) {
  std::int64_t s = 0;
  for (auto x : v) s = checked_add(s, x < 0 ? -x : x);
  return s;
}

/// Affine function f(x) = A x + b with A an m-by-n integer matrix.
struct IntAffineFn {
  std::vector<IntVec> linear;  // m rows, each of length n
  IntVec constant;             // length m

  std::size_t out_dim() const { return constant.size(); }
  std::size_t in_dim() const { return linear.empty() ? 0 : linear[0].size(); }

  static IntAffineFn identity(std::size_t n) {
    IntAffineFn f;
    f.linear.assign(n, IntVec(n, 0));
    for (std::size_t i = 0; i < n; ++i) f.linear[i][i] = 1;
    f.constant.assign(n, 0);
    return f;
  }

  bool is_uniform() const {
    if (linear.size() != in_dim() || linear.size() != constant.size()) return false;
    for (std::size_t i = 0; i < linear.size(); ++i)
      for (std::size_t j = 0; j < linear[i].size(); ++j)
        if (linear[i][j] != (i == j ? 1 : 0)) return false;
    return true;
  }

  bool operator==(const IntAffineFn& o) const {
    return linear == o.linear && constant == o.constant;
  }
};

inline IntVec apply_affine(const IntAffineFn& f, const IntVec& x) {
  if (f.linear.size() != f.constant.size())
    fail(ErrorKind::DimMismatch, "apply_affine: malformed function");
  if (!f.linear.empty() && x.size() != f.in_dim())
    fail(ErrorKind::DimMismatch, "apply_affine: input dimension mismatch");
  IntVec r(f.out_dim());
  for (std::size_t i = 0; i < f.out_dim(); ++i)
    r[i] = checked_add(dot(f.linear[i], x), f.constant[i]);
  return r;
}

}  // namespace pcot
