#include "pcot/tiler.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace pcot {

bool BoxEmptiness::stmt_nonempty(std::size_t stmt, const OrthantBox& box) const {
  const std::size_t d = band_dim;
  for (const auto& row : stmt_rows[stmt]) {
    std::int64_t v = row.back();
    for (std::size_t i = 0; i < d; ++i) {
      v = checked_add(v, checked_mul(row[i], box.origin[i]));
      v = checked_add(v, checked_mul(row[d + i], box.size[i]));
    }
    if (v < 0) return false;
  }
  return true;
}

bool BoxEmptiness::empty(const OrthantBox& box) const {
  for (std::size_t s = 0; s < stmt_rows.size(); ++s)
    if (stmt_nonempty(s, box)) return false;
  return true;
}

BoxEmptiness make_box_emptiness(const Prdg& p, const IntVec& params) {
  if (!p.is_perfect())
    fail(ErrorKind::Validation, "make_box_emptiness: kernel must be embedded");
  const std::size_t d = p.tilable_band.size();
  const std::size_t full = p.indices.size();
  BoxEmptiness be;
  be.band_dim = d;
  for (const auto& s : p.statements) {
    // Project the statement domain onto the band dimensions.
    Domain bd = bind_params(s.domain, params);
    std::vector<std::size_t> drop;
    for (std::size_t i = d; i < full; ++i) drop.push_back(i);
    bd = fm_project(bd, drop);

    // Variables x_0..x_{d-1}; symbolic box parameters o_0.. and s_0..
    const std::size_t width = d + 2 * d + 1;
    std::vector<IntVec> rows;
    for (const auto& r : bd.rows) {
      IntVec nr(width, 0);
      for (std::size_t i = 0; i < d; ++i) nr[i] = r[i];
      nr.back() = r.back();
      rows.push_back(std::move(nr));
    }
    for (std::size_t i = 0; i < d; ++i) {
      IntVec lo(width, 0), hi(width, 0);
      lo[i] = 1;          // x_i - o_i >= 0
      lo[d + i] = -1;
      rows.push_back(lo);
      hi[i] = -1;         // o_i + s_i - 1 - x_i >= 0
      hi[d + i] = 1;
      hi[d + d + i] = 1;
      hi.back() = -1;
      rows.push_back(hi);
    }
    for (std::size_t i = 0; i < d; ++i) rows = fm_eliminate_column(rows, i, width);

    // The x columns are gone; keep (o, s, 1) coefficients.
    std::vector<IntVec> cond;
    for (const auto& r : rows) {
      IntVec cr(2 * d + 1);
      for (std::size_t i = 0; i < 2 * d; ++i) cr[i] = r[d + i];
      cr.back() = r.back();
      cond.push_back(std::move(cr));
    }
    be.stmt_rows.push_back(std::move(cond));
  }
  return be;
}

PaddedBox pad_box(const OrthantBox& bb, const TileSpec& t) {
  if (t.leaf.size() != bb.dim())
    fail(ErrorKind::DimMismatch, "pad_box: tile spec dimension mismatch");
  PaddedBox pb;
  pb.box.origin = bb.origin;
  pb.box.size.resize(bb.dim());
  pb.levels.assign(bb.dim(), 0);
  for (std::size_t i = 0; i < bb.dim(); ++i) {
    if (t.leaf[i] <= 0) fail(ErrorKind::Validation, "pad_box: leaf size must be positive");
    std::int64_t size = t.leaf[i];
    std::int64_t k = 0;
    while (size < bb.size[i]) {
      size = checked_mul(size, 2);
      ++k;
    }
    pb.box.size[i] = size;
    pb.levels[i] = k;
  }
  return pb;
}

std::vector<OrthantBox> split_orthants(const OrthantBox& box, const TileSpec& t) {
  const std::size_t d = box.dim();
  IntVec half(d);
  for (std::size_t i = 0; i < d; ++i)
    half[i] = box.size[i] > t.leaf[i] ? ceil_div(box.size[i], 2) : box.size[i];
  std::vector<OrthantBox> out;
  out.reserve(std::size_t(1) << d);
  for (std::size_t idx = 0; idx < (std::size_t(1) << d); ++idx) {
    OrthantBox c;
    c.origin.resize(d);
    c.size.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      bool second = (idx >> (d - 1 - i)) & 1;
      c.origin[i] = second ? checked_add(box.origin[i], half[i]) : box.origin[i];
      c.size[i] = second ? checked_sub(box.size[i], half[i]) : half[i];
    }
    out.push_back(std::move(c));
  }
  return out;
}

OrthantBox band_bounding_box(const Prdg& p, const IntVec& params) {
  Prdg e = p.is_perfect() ? p : embed(p);
  const std::size_t d = e.tilable_band.size();
  const std::size_t full = e.indices.size();
  bool have = false;
  OrthantBox acc;
  for (const auto& s : e.statements) {
    Domain bd = bind_params(s.domain, params);
    if (is_empty_rational(bd, {})) continue;
    std::vector<std::size_t> drop;
    for (std::size_t i = d; i < full; ++i) drop.push_back(i);
    OrthantBox bb = bounding_box(fm_project(bd, drop), {});
    if (!have) {
      acc = bb;
      have = true;
      continue;
    }
    for (std::size_t i = 0; i < d; ++i) {
      std::int64_t lo = std::min(acc.origin[i], bb.origin[i]);
      std::int64_t hi = std::max(checked_add(acc.origin[i], acc.size[i]),
                                 checked_add(bb.origin[i], bb.size[i]));
      acc.origin[i] = lo;
      acc.size[i] = checked_sub(hi, lo);
    }
  }
  if (!have) fail(ErrorKind::Validation, "band_bounding_box: all statement domains empty");
  return acc;
}

namespace {

struct CotWalker {
  const TileSpec& t;
  const TilerOpts& opts;
  const BoxEmptiness& be;
  TileOrder& order;
  std::vector<int> path;

  bool is_leaf(const OrthantBox& box) const {
    for (std::size_t i = 0; i < box.dim(); ++i)
      if (box.size[i] > t.leaf[i]) return false;
    return true;
  }

  void visit(const OrthantBox& box) {
    ++order.nodes_visited;
    if (is_leaf(box)) {
      order.leaves.push_back(box);
      order.paths.push_back(path);
      return;
    }
    auto children = split_orthants(box, t);
    for (std::size_t idx = 0; idx < children.size(); ++idx) {
      const OrthantBox& c = children[idx];
      if (opts.skip_zero_orthants) {
        bool zero = false;
        for (auto s : c.size)
          if (s == 0) zero = true;
        if (zero) continue;
      }
      if (opts.skip_empty_orthants && c.volume() > 0 && be.empty(c)) continue;
      path.push_back(static_cast<int>(idx));
      visit(c);
      path.pop_back();
    }
  }
};

}  // namespace

TileOrder cot_order(const Prdg& p, const IntVec& params, const TileSpec& t,
                    const TilerOpts& opts) {
  Prdg e = p.is_perfect() ? p : embed(p);
  if (t.leaf.size() != e.tilable_band.size())
    fail(ErrorKind::DimMismatch, "cot_order: tile spec width != band width");
  TileOrder order;
  order.scheme = Scheme::Cot;
  order.band_dim = e.tilable_band.size();
  order.band_box = band_bounding_box(e, params);
  BoxEmptiness be = make_box_emptiness(e, params);
  PaddedBox pb = pad_box(order.band_box, t);
  CotWalker w{t, opts, be, order, {}};
  w.visit(pb.box);
  return order;
}

TileOrder slt_order(const Prdg& p, const IntVec& params, const TileSpec& t,
                    const TilerOpts& opts) {
  Prdg e = p.is_perfect() ? p : embed(p);
  const std::size_t d = e.tilable_band.size();
  if (t.leaf.size() != d)
    fail(ErrorKind::DimMismatch, "slt_order: tile spec width != band width");
  TileOrder order;
  order.scheme = Scheme::Slt;
  order.band_dim = d;
  order.band_box = band_bounding_box(e, params);
  BoxEmptiness be = make_box_emptiness(e, params);
  const OrthantBox& bb = order.band_box;
  IntVec counts(d);
  for (std::size_t i = 0; i < d; ++i) counts[i] = ceil_div(bb.size[i], t.leaf[i]);
  IntVec k(d, 0);
  while (true) {
    OrthantBox tile;
    tile.origin.resize(d);
    tile.size.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      tile.origin[i] = checked_add(bb.origin[i], checked_mul(k[i], t.leaf[i]));
      std::int64_t end = std::min(checked_add(tile.origin[i], t.leaf[i]),
                                  checked_add(bb.origin[i], bb.size[i]));
      tile.size[i] = checked_sub(end, tile.origin[i]);
    }
    if (!(opts.skip_empty_orthants && be.empty(tile))) order.leaves.push_back(tile);
    std::size_t dim = d;
    bool done = false;
    while (dim > 0) {
      --dim;
      ++k[dim];
      if (k[dim] < counts[dim]) break;
      k[dim] = 0;
      if (dim == 0) done = true;
    }
    if (done) break;
  }
  return order;
}

TileOrder assign_wavefront_phases(const TileOrder& order) {
  if (order.scheme != Scheme::Cot)
    fail(ErrorKind::Validation, "assign_wavefront_phases: needs a COT order");
  TileOrder out = order;
  out.phases.clear();
  for (const auto& path : order.paths) {
    std::vector<int> ph;
    ph.reserve(path.size());
    for (int idx : path) ph.push_back(__builtin_popcount(static_cast<unsigned>(idx)));
    out.phases.push_back(std::move(ph));
  }
  return out;
}

TileOrder linearize_wavefront(const TileOrder& order, std::uint64_t seed) {
  if (order.phases.size() != order.leaves.size())
    fail(ErrorKind::Validation, "linearize_wavefront: phases not assigned");
  std::vector<std::size_t> idx(order.leaves.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> tie(idx.size());
  for (auto& t : tie) t = rng();
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (order.phases[a] != order.phases[b]) return order.phases[a] < order.phases[b];
    return tie[a] < tie[b];
  });
  TileOrder out = order;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.leaves[i] = order.leaves[idx[i]];
    out.paths[i] = order.paths[idx[i]];
    out.phases[i] = order.phases[idx[i]];
  }
  return out;
}

std::string dump_order(const TileOrder& order) {
  std::ostringstream os;
  auto join = [](const auto& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s << ",";
      s << v[i];
    }
    return s.str();
  };
  for (std::size_t i = 0; i < order.leaves.size(); ++i) {
    os << "origin=" << join(order.leaves[i].origin)
       << " size=" << join(order.leaves[i].size);
    if (i < order.phases.size()) os << " phase=" << join(order.phases[i]);
    os << "\n";
  }
  return os.str();
}

}  // namespace pcot
