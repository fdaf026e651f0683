#pragma once

#include "pcot/affine.hpp"

namespace pcot {

/// Half-open hyper-rectangle: origin_i <= p_i < origin_i + size_i.
struct OrthantBox {
  IntVec origin;
  IntVec size;

  std::size_t dim() const { return origin.size(); }

  bool contains(const IntVec& p) const {
    if (p.size() != dim()) fail(ErrorKind::DimMismatch, "OrthantBox::contains");
    for (std::size_t i = 0; i < dim(); ++i)
      if (p[i] < origin[i] || p[i] >= checked_add(origin[i], size[i])) return false;
    return true;
  }

  std::int64_t volume() const {
    std::int64_t v = 1;
    for (auto s : size) v = checked_mul(v, s);
    return v;
  }

  bool operator==(const OrthantBox& o) const {
    return origin == o.origin && size == o.size;
  }
};

}  // namespace pcot
