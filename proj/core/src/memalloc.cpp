#include "pcot/memalloc.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace pcot {

namespace {

std::string join_vec(const IntVec& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  os << ")";
  return os.str();
}

bool is_zero(const IntVec& v) {
  return std::all_of(v.begin(), v.end(), [](std::int64_t c) { return c == 0; });
}

std::vector<AffineExpr> bind_subs(const std::vector<AffineExpr>& subs, std::size_t nidx,
                                  const IntVec& params) {
  std::vector<AffineExpr> out;
  out.reserve(subs.size());
  for (const auto& s : subs) out.push_back(bind_affine_params(s, nidx, params));
  return out;
}

/// Re-attach zero parameter columns to a bound domain.
Domain with_param_cols(const Domain& d, std::size_t np) {
  if (d.param_dim != 0) fail(ErrorKind::Validation, "with_param_cols: domain not bound");
  Domain r;
  r.index_dim = d.index_dim;
  r.param_dim = np;
  for (const auto& row : d.rows) {
    IntVec nr(r.row_len(), 0);
    for (std::size_t i = 0; i < d.index_dim; ++i) nr[i] = row[i];
    nr.back() = row.back();
    r.rows.push_back(std::move(nr));
  }
  return r;
}

/// Rational shadow of { g(z) : z in dom }; dom bound, g over dom's indices.
Domain affine_image(const Domain& dom, const std::vector<AffineExpr>& g) {
  const std::size_t n = dom.index_dim;
  const std::size_t m = g.size();
  Domain big;
  big.index_dim = m + n;
  big.param_dim = 0;
  for (const auto& r : dom.rows) {
    IntVec nr(m + n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) nr[m + i] = r[i];
    nr.back() = r.back();
    big.rows.push_back(std::move(nr));
  }
  for (std::size_t i = 0; i < m; ++i) {
    IntVec eq(m + n + 1, 0);
    eq[i] = 1;
    for (std::size_t j = 0; j < n; ++j) eq[m + j] = -g[i].coeffs[j];
    eq.back() = -g[i].constant;
    big.rows.push_back(eq);
    for (auto& v : eq) v = -v;
    big.rows.push_back(std::move(eq));
  }
  std::vector<std::size_t> drop;
  for (std::size_t j = 0; j < n; ++j) drop.push_back(m + j);
  return fm_project(big, drop);
}

/// Constant value of z - g(z) over the bound domain, if it is constant.
/// Symbolic when the linear part is the identity; otherwise certified by
/// enumeration, giving up (truly affine) past the enumeration cap.
std::optional<IntVec> constant_offset(const Domain& dom_bound,
                                      const std::vector<AffineExpr>& g) {
  const std::size_t n = dom_bound.index_dim;
  if (g.size() != n) return std::nullopt;
  bool ident = true;
  for (std::size_t i = 0; i < n && ident; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g[i].coeffs[j] != (i == j ? 1 : 0)) {
        ident = false;
        break;
      }
  if (ident) {
    IntVec off(n);
    for (std::size_t i = 0; i < n; ++i) off[i] = -g[i].constant;
    return off;
  }
  std::vector<IntVec> pts;
  try {
    pts = enumerate_points(dom_bound, {}, 1'000'000);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (pts.empty()) return zeros(n);
  IntVec first;
  for (const auto& z : pts) {
    IntVec gz(n);
    for (std::size_t i = 0; i < n; ++i) gz[i] = g[i].eval(z, {});
    IntVec off = vec_sub(z, gz);
    if (first.empty())
      first = std::move(off);
    else if (off != first)
      return std::nullopt;
  }
  return first;
}

void box_union(std::optional<OrthantBox>& acc, const OrthantBox& b) {
  if (!acc) {
    acc = b;
    return;
  }
  for (std::size_t i = 0; i < b.dim(); ++i) {
    std::int64_t lo = std::min(acc->origin[i], b.origin[i]);
    std::int64_t hi = std::max(checked_add(acc->origin[i], acc->size[i]),
                               checked_add(b.origin[i], b.size[i]));
    acc->origin[i] = lo;
    acc->size[i] = checked_sub(hi, lo);
  }
}

void collect_reads(const ExprPtr& e, std::vector<const Expr*>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Read) out.push_back(e.get());
  collect_reads(e->lhs, out);
  collect_reads(e->rhs, out);
}

ExprPtr retarget(const ExprPtr& e, const std::string& from,
                 const std::vector<std::vector<AffineExpr>>& subs_list,
                 const std::string& to) {
  if (!e) return e;
  if (e->kind == Expr::Kind::Read) {
    if (e->array == from &&
        std::find(subs_list.begin(), subs_list.end(), e->subscripts) != subs_list.end()) {
      auto n = std::make_shared<Expr>(*e);
      n->array = to;
      return n;
    }
    return e;
  }
  ExprPtr l = retarget(e->lhs, from, subs_list, to);
  ExprPtr r = retarget(e->rhs, from, subs_list, to);
  if (l == e->lhs && r == e->rhs) return e;
  auto n = std::make_shared<Expr>(*e);
  n->lhs = l;
  n->rhs = r;
  return n;
}

}  // namespace

std::optional<IntVec> uniform_in_context(const PrdgEdge& e, const IntVec& params) {
  const std::size_t n = e.context.index_dim;
  if (e.fn.out_dim() != n) return std::nullopt;
  if (e.fn.is_uniform()) {
    IntVec off(n);
    for (std::size_t i = 0; i < n; ++i) off[i] = -e.fn.constant[i];
    return off;
  }
  std::vector<AffineExpr> g;
  g.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AffineExpr a;
    a.coeffs = e.fn.linear[i];
    a.constant = e.fn.constant[i];
    g.push_back(std::move(a));
  }
  return constant_offset(bind_params(e.context, params), g);
}

UovResult find_uov(const std::vector<IntVec>& deps_in, int max_terms) {
  UovResult res;
  std::vector<IntVec> deps;
  for (const auto& d : deps_in) {
    if (is_zero(d)) continue;
    if (std::find(deps.begin(), deps.end(), d) == deps.end()) deps.push_back(d);
  }
  if (deps.empty()) {
    res.witness = "no nonzero dependence vectors";
    return res;
  }
  const std::size_t n = deps[0].size();
  for (const auto& d : deps)
    if (d.size() != n) fail(ErrorKind::DimMismatch, "find_uov: mixed dimensions");

  // Closure of non-empty non-negative integer combinations, bounded by term
  // count and per-component magnitude.
  constexpr std::int64_t kComponentBound = 256;
  std::set<IntVec> closure;
  std::set<IntVec> frontier{zeros(n)};
  for (int k = 0; k < max_terms; ++k) {
    std::set<IntVec> next;
    for (const auto& v : frontier)
      for (const auto& d : deps) {
        IntVec s = vec_add(v, d);
        bool ok = true;
        for (auto c : s)
          if (c > kComponentBound || c < -kComponentBound) ok = false;
        if (ok && !closure.count(s)) next.insert(s);
      }
    if (next.empty()) break;
    closure.insert(next.begin(), next.end());
    frontier = std::move(next);
    if (closure.size() > 2'000'000) break;
  }

  std::vector<IntVec> cands(closure.begin(), closure.end());
  std::sort(cands.begin(), cands.end(), [](const IntVec& a, const IntVec& b) {
    std::int64_t la = l1_norm(a), lb = l1_norm(b);
    if (la != lb) return la < lb;
    return a < b;
  });
  for (const auto& u : cands) {
    bool valid = true;
    for (const auto& d : deps) {
      IntVec r = vec_sub(u, d);
      if (!is_zero(r) && !closure.count(r)) {
        valid = false;
        break;
      }
    }
    if (valid) {
      res.vector = u;
      res.valid = true;
      std::ostringstream w;
      w << "u=" << join_vec(u) << " minimal by (l1,lex) among " << cands.size()
        << " combinations of <=" << max_terms << " terms; every u-d is zero or reachable";
      res.witness = w.str();
      return res;
    }
  }
  std::ostringstream w;
  w << "no valid vector among " << cands.size() << " combinations of <=" << max_terms
    << " terms";
  res.witness = w.str();
  return res;
}

std::vector<MemoryMap> single_assignment_maps(const Prdg& p, const IntVec& params) {
  std::vector<MemoryMap> maps;
  for (const auto& a : p.arrays) {
    MemoryMap m;
    m.array = a.name;
    m.map = IntAffineFn::identity(a.rank);
    m.moduli = zeros(a.rank);
    m.extents.resize(a.rank);
    for (std::size_t i = 0; i < a.rank; ++i) {
      m.extents[i] = a.extents[i].eval({}, params);
      if (m.extents[i] <= 0)
        fail(ErrorKind::Validation, "single_assignment_maps: non-positive extent for " + a.name);
    }
    m.single_assignment = true;
    maps.push_back(std::move(m));
  }
  return maps;
}

std::int64_t footprint(const std::vector<MemoryMap>& maps) {
  std::int64_t total = 0;
  for (const auto& m : maps) total = checked_add(total, m.words());
  return total;
}

AllocResult allocate(const Prdg& p0, const IntVec& params) {
  if (params.size() != p0.params.size())
    fail(ErrorKind::DimMismatch, "allocate: parameter count");
  AllocResult res;
  res.transformed = p0.is_perfect() ? p0 : embed(p0);
  Prdg& t = res.transformed;
  const std::size_t full = t.indices.size();
  const std::size_t np = t.params.size();

  // Per-edge classification, kept index-aligned with t.edges for the split.
  std::vector<EdgeClass> edge_cls(t.edges.size(), EdgeClass::TrulyAffine);
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    const auto& ed = t.edges[i];
    EdgeClassReport r;
    r.src = ed.src;
    r.dst = ed.dst;
    if (auto off = uniform_in_context(ed, params)) {
      r.cls = ed.fn.is_uniform() ? EdgeClass::Uniform : EdgeClass::UniformInContext;
      r.offset = *off;
    } else {
      r.cls = EdgeClass::TrulyAffine;
    }
    edge_cls[i] = r.cls;
    res.edge_classes.push_back(std::move(r));
  }

  // Cache of bound statement domains.
  std::vector<Domain> bound_dom;
  bound_dom.reserve(t.statements.size());
  for (const auto& s : t.statements) bound_dom.push_back(bind_params(s.domain, params));

  // A temp array can get a reuse map when its cell space is the full instance
  // space and every write lands on the cell named by the instance.
  std::set<std::string> eligible;
  for (const auto& a : t.arrays) {
    if (a.kind != ArrayKind::Temp || a.rank != full) continue;
    bool ok = true;
    for (std::size_t si = 0; si < t.statements.size() && ok; ++si) {
      const auto& s = t.statements[si];
      if (s.writes.array != a.name) continue;
      auto off = constant_offset(bound_dom[si], bind_subs(s.writes.subscripts, full, params));
      if (!off || !is_zero(*off)) ok = false;
    }
    if (ok) eligible.insert(a.name);
  }

  // Classify reads of eligible arrays per (statement, subscripts).
  struct AffineRead {
    std::size_t stmt;
    std::string array;
    std::vector<AffineExpr> subs;  // unbound
  };
  std::vector<AffineRead> affine_reads;
  std::map<std::string, std::vector<IntVec>> deps;
  const std::size_t orig_stmt_count = t.statements.size();
  for (std::size_t si = 0; si < orig_stmt_count; ++si) {
    std::vector<const Expr*> reads;
    collect_reads(t.statements[si].body, reads);
    std::vector<std::pair<std::string, std::vector<AffineExpr>>> seen;
    for (const Expr* rd : reads) {
      if (!eligible.count(rd->array)) continue;
      auto key = std::make_pair(rd->array, rd->subscripts);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      auto off = constant_offset(bound_dom[si], bind_subs(rd->subscripts, full, params));
      if (off) {
        if (!is_zero(*off)) {
          auto& dv = deps[rd->array];
          if (std::find(dv.begin(), dv.end(), *off) == dv.end()) dv.push_back(*off);
        }
      } else {
        affine_reads.push_back({si, rd->array, rd->subscripts});
      }
    }
  }

  // Affine split: one copy array per truly affine read, single-assignment
  // over the read's image. Image dimensions fixed by equality rows are
  // projected out of the copy's storage, so a surface region gets
  // surface-sized storage. Copy statements run after every original one.
  std::set<std::string> split_arrays;
  for (const auto& ar : affine_reads) split_arrays.insert(ar.array);
  std::map<std::string, MemoryMap> copy_maps;
  std::vector<Statement> copy_stmts;
  std::vector<PrdgEdge> new_edges;
  for (std::size_t ri = 0; ri < affine_reads.size(); ++ri) {
    const AffineRead& ar = affine_reads[ri];
    std::string cp = ar.array + "_cp" + std::to_string(ri);
    while (t.find_array(cp) || copy_maps.count(cp)) cp += "_";

    std::vector<AffineExpr> bsubs = bind_subs(ar.subs, full, params);
    Domain img = affine_image(bound_dom[ar.stmt], bsubs);
    IntAffineFn read_fn;
    for (const auto& s : bsubs) {
      read_fn.linear.push_back(s.coeffs);
      read_fn.constant.push_back(s.constant);
    }

    // A dimension with a unit coefficient in an image equality is an affine
    // function of the remaining ones; one new dimension per equality.
    std::vector<char> determined(full, 0);
    {
      std::set<IntVec> rowset(img.rows.begin(), img.rows.end());
      std::set<IntVec> done;
      for (const auto& r : img.rows) {
        IntVec neg = r;
        for (auto& v : neg) v = -v;
        if (!rowset.count(neg)) continue;
        if (!done.insert(std::min(r, neg)).second) continue;
        for (std::size_t j = full; j-- > 0;)
          if ((r[j] == 1 || r[j] == -1) && !determined[j]) {
            determined[j] = 1;
            break;
          }
      }
    }

    std::optional<OrthantBox> bb;  // union of the pieces, full rank
    for (std::size_t wi = 0; wi < orig_stmt_count; ++wi) {
      const auto& w = t.statements[wi];
      if (w.writes.array != ar.array) continue;
      Domain piece = intersect(img, bound_dom[wi]);
      if (is_empty_rational(piece, {})) continue;
      box_union(bb, bounding_box(piece, {}));

      Statement cs;
      cs.id = cp + "_" + std::to_string(copy_stmts.size());
      cs.depth = full;
      cs.domain = with_param_cols(piece, np);
      cs.writes.array = cp;
      auto ident_subs = [&] {
        std::vector<AffineExpr> subs(full);
        for (std::size_t i = 0; i < full; ++i) {
          subs[i].coeffs = zeros(full + np);
          subs[i].coeffs[i] = 1;
        }
        return subs;
      };
      cs.writes.subscripts = ident_subs();
      auto body = std::make_shared<Expr>();
      body->kind = Expr::Kind::Read;
      body->array = ar.array;
      body->subscripts = ident_subs();
      cs.body = body;

      PrdgEdge cw;  // copy reads the writer's cell in place
      cw.src = cs.id;
      cw.dst = w.id;
      cw.context = cs.domain;
      cw.fn = IntAffineFn::identity(full);
      new_edges.push_back(std::move(cw));

      PrdgEdge rc;  // the affine reader now consumes the copy
      rc.src = t.statements[ar.stmt].id;
      rc.dst = cs.id;
      rc.fn = read_fn;
      Domain ctx = bound_dom[ar.stmt];
      for (const auto& prow : piece.rows) {
        // Compose the piece constraint with the read map: row'(z) = row(g(z)).
        IntVec nr(full + 1, 0);
        std::int64_t c = prow.back();
        for (std::size_t i = 0; i < full; ++i) {
          for (std::size_t j = 0; j < full; ++j)
            nr[j] = checked_add(nr[j], checked_mul(prow[i], bsubs[i].coeffs[j]));
          c = checked_add(c, checked_mul(prow[i], bsubs[i].constant));
        }
        nr.back() = c;
        ctx.rows.push_back(std::move(nr));
      }
      rc.context = with_param_cols(ctx, np);
      new_edges.push_back(std::move(rc));

      copy_stmts.push_back(std::move(cs));
    }
    if (!bb)
      fail(ErrorKind::Validation,
           "allocate: affine read of never-written array " + ar.array);

    // Storage keeps only the free dimensions, shifted to the bounding box.
    MemoryMap cm;
    cm.array = cp;
    for (std::size_t j = 0; j < full; ++j) {
      if (determined[j]) continue;
      IntVec row = zeros(full);
      row[j] = 1;
      cm.map.linear.push_back(std::move(row));
      cm.map.constant.push_back(-bb->origin[j]);
      cm.moduli.push_back(0);
      cm.extents.push_back(bb->size[j]);
    }
    cm.single_assignment = true;
    copy_maps[cp] = std::move(cm);

    ArrayDecl decl;
    decl.name = cp;
    decl.rank = full;
    decl.kind = ArrayKind::Temp;
    for (std::size_t i = 0; i < full; ++i) {
      AffineExpr ext;
      ext.coeffs = zeros(np);
      ext.constant = checked_add(bb->origin[i], bb->size[i]);
      decl.extents.push_back(ext);
    }
    t.arrays.push_back(std::move(decl));

    t.statements[ar.stmt].body =
        retarget(t.statements[ar.stmt].body, ar.array, {ar.subs}, cp);
  }
  res.copy_statements = copy_stmts.size();
  for (auto& cs : copy_stmts) t.statements.push_back(std::move(cs));

  // Replace the truly affine flow edges into split arrays with the copy edges.
  {
    std::vector<PrdgEdge> kept;
    for (std::size_t i = 0; i < t.edges.size(); ++i) {
      const auto& ed = t.edges[i];
      const Statement* dst = t.find_statement(ed.dst);
      bool replaced = ed.kind == EdgeKind::Flow && edge_cls[i] == EdgeClass::TrulyAffine &&
                      dst && split_arrays.count(dst->writes.array);
      if (!replaced) kept.push_back(ed);
    }
    kept.insert(kept.end(), new_edges.begin(), new_edges.end());
    t.edges = std::move(kept);
  }

  // Memory maps.
  for (const auto& a : t.arrays) {
    auto cit = copy_maps.find(a.name);
    const bool is_copy = cit != copy_maps.end();

    if (a.kind != ArrayKind::Temp) {
      MemoryMap m;
      m.array = a.name;
      m.map = IntAffineFn::identity(a.rank);
      m.moduli = zeros(a.rank);
      m.extents.resize(a.rank);
      for (std::size_t i = 0; i < a.rank; ++i) m.extents[i] = a.extents[i].eval({}, params);
      m.single_assignment = true;
      res.maps.push_back(std::move(m));
      continue;
    }

    ArrayAllocReport rep;
    rep.array = a.name;
    rep.is_copy = is_copy;
    MemoryMap m;
    m.array = a.name;

    auto single = [&](const char* why) {
      m.map = IntAffineFn::identity(a.rank);
      m.moduli = zeros(a.rank);
      m.extents.resize(a.rank);
      for (std::size_t i = 0; i < a.rank; ++i) m.extents[i] = a.extents[i].eval({}, params);
      m.single_assignment = true;
      rep.single_assignment = true;
      if (rep.uov.witness.empty()) rep.uov.witness = why;
    };

    auto it = deps.find(a.name);
    if (is_copy) {
      m = cit->second;
      rep.single_assignment = true;
      rep.uov.witness = "copy array: single assignment over the image surface";
    } else if (!eligible.count(a.name)) {
      single("writes are not identity on the instance space");
    } else if (it == deps.end() || it->second.empty()) {
      single("no uniform self-dependences to fold");
    } else {
      rep.uov = find_uov(it->second);
      bool mapped = false;
      if (rep.uov.valid) {
        const IntVec& u = rep.uov.vector;
        std::size_t j0 = 0;
        while (j0 < full && u[j0] == 0) ++j0;
        std::int64_t c = u[j0];
        bool divisible = true;
        for (std::size_t i = 0; i < full; ++i)
          if (i != j0 && u[i] % c != 0) divisible = false;
        if (divisible) {
          m.map.linear.assign(full, zeros(full));
          m.map.constant = zeros(full);
          m.moduli = zeros(full);
          for (std::size_t i = 0; i < full; ++i) {
            m.map.linear[i][i] = 1;
            if (i == j0)
              m.moduli[i] = c;
            else
              m.map.linear[i][j0] = -u[i] / c;
          }
          // Extents from the image of the writers' instance space.
          std::vector<AffineExpr> rows(full);
          for (std::size_t i = 0; i < full; ++i) {
            rows[i].coeffs = m.map.linear[i];
            rows[i].constant = 0;
          }
          std::optional<OrthantBox> img;
          for (std::size_t wi = 0; wi < orig_stmt_count; ++wi)
            if (t.statements[wi].writes.array == a.name &&
                !is_empty_rational(bound_dom[wi], {}))
              box_union(img, bounding_box(affine_image(bound_dom[wi], rows), {}));
          if (img) {
            m.extents.resize(full);
            for (std::size_t i = 0; i < full; ++i) {
              if (i == j0) {
                m.extents[i] = c;
                m.map.linear[i][i] = 1;
              } else {
                m.map.constant[i] = -img->origin[i];
                m.extents[i] = img->size[i];
              }
            }
            // Pad the innermost extent so the row stride is an odd number
            // of 64-byte lines: power-of-two strides alias entire reuse
            // blocks onto a single associativity class of a set-indexed
            // cache, destroying locality the map was built to preserve.
            if (full >= 2 && full - 1 != j0 && m.extents[full - 1] >= 64) {
              std::int64_t e = (m.extents[full - 1] + 7) / 8 * 8;
              if ((e / 8) % 2 == 0) e += 8;
              m.extents[full - 1] = e;
            }
            mapped = true;
          }
        } else {
          rep.uov.witness += "; leading component does not divide the rest";
        }
      }
      if (!mapped) single("no usable occupancy vector");
    }

    rep.words = m.words();
    res.maps.push_back(std::move(m));
    res.arrays.push_back(std::move(rep));
  }

  // Footprints: storage under the maps vs full expansion of the original temps.
  for (const auto& m : res.maps) {
    const ArrayDecl* a = t.find_array(m.array);
    if (a && a->kind == ArrayKind::Temp)
      res.footprint_alloc = checked_add(res.footprint_alloc, m.words());
  }
  for (const auto& a : p0.arrays)
    if (a.kind == ArrayKind::Temp) {
      std::int64_t w = 1;
      for (const auto& e : a.extents) w = checked_mul(w, e.eval({}, params));
      res.footprint_single = checked_add(res.footprint_single, w);
    }

  return res;
}

}  // namespace pcot
