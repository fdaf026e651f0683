#include "pcot/prdg.hpp"

#include <algorithm>

namespace pcot {

std::vector<IntVec> enumerate_points(const Domain& d, const IntVec& params,
                                     std::int64_t cap) {
  Domain b = d.param_dim ? bind_params(d, params) : d;
  if (is_empty_rational(b, {})) return {};
  OrthantBox box = bounding_box(b, {});
  if (box.volume() > cap)
    fail(ErrorKind::Validation, "enumerate_points: domain too large to enumerate");
  std::vector<IntVec> out;
  IntVec p = box.origin;
  const std::size_t n = box.dim();
  if (n == 0) {
    out.push_back({});
    return out;
  }
  while (true) {
    if (b.contains(p, {})) out.push_back(p);
    std::size_t k = n;
    while (k > 0) {
      --k;
      ++p[k];
      if (p[k] < box.origin[k] + box.size[k]) break;
      p[k] = box.origin[k];
      if (k == 0) return out;
    }
  }
}

namespace {

AffineExpr extend_affine(const AffineExpr& a, std::size_t old_depth,
                         std::size_t new_depth, std::size_t nparams) {
  AffineExpr r;
  r.coeffs.assign(new_depth + nparams, 0);
  for (std::size_t i = 0; i < old_depth; ++i) r.coeffs[i] = a.coeffs[i];
  for (std::size_t j = 0; j < nparams; ++j)
    r.coeffs[new_depth + j] = a.coeffs[old_depth + j];
  r.constant = a.constant;
  return r;
}

ExprPtr extend_expr(const ExprPtr& e, std::size_t old_depth, std::size_t new_depth,
                    std::size_t nparams) {
  auto n = std::make_shared<Expr>(*e);
  switch (e->kind) {
    case Expr::Kind::Affine:
      n->affine = extend_affine(e->affine, old_depth, new_depth, nparams);
      break;
    case Expr::Kind::Read:
      for (auto& s : n->subscripts) s = extend_affine(s, old_depth, new_depth, nparams);
      break;
    case Expr::Kind::Bin:
      n->lhs = extend_expr(e->lhs, old_depth, new_depth, nparams);
      n->rhs = extend_expr(e->rhs, old_depth, new_depth, nparams);
      break;
    case Expr::Kind::Un:
      n->lhs = extend_expr(e->lhs, old_depth, new_depth, nparams);
      break;
    default:
      break;
  }
  return n;
}

}  // namespace

Prdg embed(const Prdg& p) {
  const std::size_t full = p.indices.size();
  const std::size_t np = p.params.size();
  Prdg r = p;
  for (auto& s : r.statements) {
    if (s.depth == full) continue;
    const std::size_t old_depth = s.depth;
    Domain d = extend_indices(s.domain, full);
    for (std::size_t k = old_depth; k < full; ++k) {
      IntVec lo(d.row_len(), 0), hi(d.row_len(), 0);
      lo[k] = 1;   // x_k >= 0
      hi[k] = -1;  // x_k <= 0
      d.rows.push_back(lo);
      d.rows.push_back(hi);
    }
    s.domain = std::move(d);
    for (auto& sub : s.writes.subscripts) sub = extend_affine(sub, old_depth, full, np);
    s.body = extend_expr(s.body, old_depth, full, np);
    s.depth = full;
  }
  for (auto& e : r.edges) {
    const Statement* old_src = p.find_statement(e.src);
    const Statement* old_dst = p.find_statement(e.dst);
    if (!old_src || !old_dst) fail(ErrorKind::Validation, "embed: dangling edge");
    const std::size_t src_depth = old_src->depth;
    const std::size_t dst_depth = old_dst->depth;
    if (src_depth < full) {
      Domain c = extend_indices(e.context, full);
      for (std::size_t k = src_depth; k < full; ++k) {
        IntVec lo(c.row_len(), 0), hi(c.row_len(), 0);
        lo[k] = 1;
        hi[k] = -1;
        c.rows.push_back(lo);
        c.rows.push_back(hi);
      }
      e.context = std::move(c);
      for (auto& row : e.fn.linear) {
        IntVec nr(full, 0);
        for (std::size_t i = 0; i < src_depth; ++i) nr[i] = row[i];
        row = std::move(nr);
      }
    }
    for (std::size_t k = dst_depth; k < full; ++k) {
      e.fn.linear.push_back(IntVec(full, 0));
      e.fn.constant.push_back(0);
    }
  }
  return r;
}

DependenceReport check_dependences_sampled(const Prdg& p, const IntVec& params) {
  Prdg e = p.is_perfect() ? p : embed(p);
  const std::size_t full = e.indices.size();
  DependenceReport rep;
  for (const auto& edge : e.edges) {
    EdgeReport er;
    er.src = edge.src;
    er.dst = edge.dst;
    er.kind = edge.kind;
    if (edge.kind != EdgeKind::Flow) {
      rep.edges.push_back(std::move(er));
      continue;
    }
    auto pts = enumerate_points(edge.context, params, 2'000'000);
    er.points = pts.size();
    for (const auto& z : pts) {
      IntVec dep = vec_sub(z, apply_affine(edge.fn, z));
      if (er.min_component.empty()) {
        er.min_component = dep;
        er.max_component = dep;
      } else {
        for (std::size_t i = 0; i < full; ++i) {
          er.min_component[i] = std::min(er.min_component[i], dep[i]);
          er.max_component[i] = std::max(er.max_component[i], dep[i]);
        }
      }
    }
    for (auto b : e.tilable_band)
      if (!er.min_component.empty() && er.min_component[b] < 0) er.flagged = true;
    rep.any_flagged = rep.any_flagged || er.flagged;
    rep.edges.push_back(std::move(er));
  }
  return rep;
}

}  // namespace pcot
