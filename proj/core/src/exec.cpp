#include "pcot/exec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace pcot {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

double init_value(const std::string& array, std::uint64_t flat) {
  std::uint64_t x = fnv1a(array.data(), array.size()) ^ (flat * 0x9E3779B97F4A7C15ULL);
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return double(x >> 11) * 0x1.0p-53;
}

struct FileTraceSink::Impl {
  std::ofstream out;
  std::vector<char> buf;
};

FileTraceSink::FileTraceSink(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) fail(ErrorKind::Io, "FileTraceSink: cannot open " + path);
  impl_->out.write("PCOTTRC1", 8);
}

FileTraceSink::~FileTraceSink() = default;

void FileTraceSink::on_batch(const TraceEvent* ev, std::size_t n) {
  auto& buf = impl_->buf;
  buf.resize(n * 13);
  char* p = buf.data();
  for (std::size_t i = 0; i < n; ++i) {
    *p++ = char(ev[i].kind);
    std::uint32_t a = ev[i].array;
    std::uint64_t ad = ev[i].addr;
    std::memcpy(p, &a, 4);  // little-endian hosts only
    p += 4;
    std::memcpy(p, &ad, 8);
    p += 8;
  }
  impl_->out.write(buf.data(), std::streamsize(buf.size()));
  if (!impl_->out) fail(ErrorKind::Io, "FileTraceSink: write failed");
}

namespace {

constexpr std::int64_t kNoBound = std::numeric_limits<std::int64_t>::max() / 4;

struct PhysRef {
  int array = -1;
  std::vector<IntVec> coeffs;  // per storage dim, over the full point
  IntVec consts;
  IntVec moduli;
  IntVec extents;
  IntVec strides;
  IntVec lcoeffs;  // flat logical cell id, affine over the point
  std::int64_t lconst = 0;
};

struct Op {
  enum class K { Lit, Aff, Read, Add, Sub, Mul, Div, Min, Max, Neg, Sqrt };
  K k = K::Lit;
  double lit = 0.0;
  IntVec ac;  // Aff: coefficients over the point
  std::int64_t acst = 0;
  int ref = -1;  // Read: index into CStmt::reads
};

struct BRow {
  IntVec pre;  // coefficients of the enclosing dimensions
  std::int64_t a = 0;
  std::int64_t c = 0;
};

struct CStmt {
  std::string id;
  bool dead = false;
  std::vector<Op> ops;
  std::vector<PhysRef> reads;
  PhysRef write;
  std::vector<std::vector<BRow>> levels;
};

struct ArrayStore {
  std::string name;
  std::vector<double> data;
  std::vector<std::int64_t> shadow;
  std::uint64_t base = 0;
  bool is_output = false;
};

}  // namespace

struct Executor::Impl {
  Prdg prdg;
  IntVec params;
  std::vector<MemoryMap> maps;
  std::size_t full = 0;
  std::size_t band_dim = 0;
  std::vector<ArrayStore> arrays;
  std::vector<CStmt> stmts;

  // Per-leaf scratch, sized once.
  std::vector<std::vector<int>> cand_buf, live_buf;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> range_buf;
  std::vector<double> stack;
  IntVec z;

  // Per-run state.
  bool oracle = false;
  TraceSink* sink = nullptr;
  std::vector<TraceEvent> batch;
  ExecResult* result = nullptr;

  int array_slot(const std::string& name) const {
    for (std::size_t i = 0; i < arrays.size(); ++i)
      if (arrays[i].name == name) return int(i);
    return -1;
  }

  const MemoryMap& map_of(const std::string& name) const {
    for (const auto& m : maps)
      if (m.array == name) return m;
    fail(ErrorKind::Validation, "Executor: no memory map for array " + name);
  }

  PhysRef build_ref(const std::string& array, const std::vector<AffineExpr>& subs) {
    const ArrayDecl* decl = prdg.find_array(array);
    if (!decl) fail(ErrorKind::Validation, "Executor: unknown array " + array);
    if (subs.size() != decl->rank)
      fail(ErrorKind::Validation, "Executor: subscript arity for " + array);
    const MemoryMap& m = map_of(array);
    PhysRef r;
    r.array = array_slot(array);
    std::vector<AffineExpr> cell;  // cell coordinates over the point
    cell.reserve(subs.size());
    for (const auto& s : subs) cell.push_back(bind_affine_params(s, full, params));

    const std::size_t pd = m.extents.size();
    r.coeffs.assign(pd, zeros(full));
    r.consts = zeros(pd);
    for (std::size_t k = 0; k < pd; ++k) {
      r.consts[k] = m.map.constant[k];
      for (std::size_t j = 0; j < decl->rank; ++j) {
        std::int64_t w = m.map.linear[k][j];
        if (w == 0) continue;
        r.consts[k] = checked_add(r.consts[k], checked_mul(w, cell[j].constant));
        for (std::size_t t = 0; t < full; ++t)
          r.coeffs[k][t] = checked_add(r.coeffs[k][t], checked_mul(w, cell[j].coeffs[t]));
      }
    }
    r.moduli = m.moduli;
    r.extents = m.extents;
    r.strides.assign(pd, 1);
    for (std::size_t k = pd; k-- > 1;)
      r.strides[k - 1] = checked_mul(r.strides[k], m.extents[k]);

    IntVec lext(decl->rank), lstr(decl->rank, 1);
    for (std::size_t j = 0; j < decl->rank; ++j) lext[j] = decl->extents[j].eval({}, params);
    for (std::size_t j = decl->rank; j-- > 1;)
      lstr[j - 1] = checked_mul(lstr[j], lext[j]);
    r.lcoeffs = zeros(full);
    r.lconst = 0;
    for (std::size_t j = 0; j < decl->rank; ++j) {
      r.lconst = checked_add(r.lconst, checked_mul(lstr[j], cell[j].constant));
      for (std::size_t t = 0; t < full; ++t)
        r.lcoeffs[t] = checked_add(r.lcoeffs[t], checked_mul(lstr[j], cell[j].coeffs[t]));
    }
    return r;
  }

  void flatten(const ExprPtr& e, CStmt& cs) {
    Op op;
    switch (e->kind) {
      case Expr::Kind::Literal:
        op.k = Op::K::Lit;
        op.lit = e->literal;
        break;
      case Expr::Kind::Affine: {
        AffineExpr a = bind_affine_params(e->affine, full, params);
        op.k = Op::K::Aff;
        op.ac = a.coeffs;
        op.acst = a.constant;
        break;
      }
      case Expr::Kind::Read:
        op.k = Op::K::Read;
        op.ref = int(cs.reads.size());
        cs.reads.push_back(build_ref(e->array, e->subscripts));
        break;
      case Expr::Kind::Bin:
        flatten(e->lhs, cs);
        flatten(e->rhs, cs);
        switch (e->bop) {
          case BinOp::Add: op.k = Op::K::Add; break;
          case BinOp::Sub: op.k = Op::K::Sub; break;
          case BinOp::Mul: op.k = Op::K::Mul; break;
          case BinOp::Div: op.k = Op::K::Div; break;
          case BinOp::Min: op.k = Op::K::Min; break;
          case BinOp::Max: op.k = Op::K::Max; break;
        }
        break;
      case Expr::Kind::Un:
        flatten(e->lhs, cs);
        op.k = e->uop == UnOp::Neg ? Op::K::Neg : Op::K::Sqrt;
        break;
    }
    cs.ops.push_back(std::move(op));
  }

  Impl(const Prdg& p, const IntVec& prm, const std::vector<MemoryMap>& mm)
      : prdg(p), params(prm), maps(mm) {
    if (!prdg.is_perfect()) fail(ErrorKind::Validation, "Executor: kernel must be embedded");
    if (params.size() != prdg.params.size())
      fail(ErrorKind::DimMismatch, "Executor: parameter count");
    full = prdg.indices.size();
    band_dim = prdg.tilable_band.size();

    std::uint64_t base = 64;
    for (const auto& a : prdg.arrays) {
      const MemoryMap& m = map_of(a.name);
      ArrayStore st;
      st.name = a.name;
      st.is_output = a.kind == ArrayKind::Output;
      st.data.resize(std::size_t(m.words()));
      st.shadow.resize(st.data.size());
      st.base = base;
      base += (std::uint64_t(st.data.size()) * 8 + 63) / 64 * 64;
      arrays.push_back(std::move(st));
    }

    for (const auto& s : prdg.statements) {
      CStmt cs;
      cs.id = s.id;
      Domain bd = bind_params(s.domain, params);
      cs.dead = is_empty_rational(bd, {});
      if (!cs.dead) bounding_box(bd, {});  // reject unbounded domains up front
      cs.levels.resize(full);
      for (std::size_t k = 0; k < full; ++k) {
        std::vector<std::size_t> drop;
        for (std::size_t j = k + 1; j < full; ++j) drop.push_back(j);
        Domain proj = fm_project(bd, drop);
        for (const auto& row : proj.rows) {
          if (row[k] == 0) continue;
          BRow br;
          br.pre.assign(row.begin(), row.begin() + k);
          br.a = row[k];
          br.c = row.back();
          cs.levels[k].push_back(std::move(br));
        }
      }
      flatten(s.body, cs);
      cs.write = build_ref(s.writes.array, s.writes.subscripts);
      stmts.push_back(std::move(cs));
    }

    cand_buf.resize(full + 1);
    live_buf.resize(full + 1);
    range_buf.assign(full, std::vector<std::pair<std::int64_t, std::int64_t>>(stmts.size()));
    z.assign(full, 0);
    stack.reserve(64);
    batch.reserve(1 << 16);
    init_storage();
  }

  void init_storage() {
    for (std::size_t i = 0; i < arrays.size(); ++i) {
      auto& st = arrays[i];
      if (prdg.arrays[i].kind == ArrayKind::Input) {
        for (std::size_t f = 0; f < st.data.size(); ++f) {
          st.data[f] = init_value(st.name, f);
          st.shadow[f] = std::int64_t(f);
        }
      } else {
        std::fill(st.data.begin(), st.data.end(), 0.0);
        std::fill(st.shadow.begin(), st.shadow.end(), std::int64_t(-1));
      }
    }
  }

  void flush() {
    if (sink && !batch.empty()) {
      sink->on_batch(batch.data(), batch.size());
      batch.clear();
    }
  }

  void trace(std::uint8_t kind, const PhysRef& r, std::int64_t flat) {
    if (!sink) return;
    batch.push_back({arrays[std::size_t(r.array)].base + std::uint64_t(flat) * 8,
                     std::uint32_t(r.array), kind});
    if (batch.size() >= (std::size_t(1) << 16)) flush();
  }

  std::int64_t phys_flat(const PhysRef& r, const CStmt& cs) {
    std::int64_t flat = 0;
    for (std::size_t k = 0; k < r.extents.size(); ++k) {
      std::int64_t comp = r.consts[k];
      for (std::size_t t = 0; t < full; ++t) comp += r.coeffs[k][t] * z[t];
      if (r.moduli[k] > 0) {
        comp %= r.moduli[k];
        if (comp < 0) comp += r.moduli[k];
      } else if (comp < 0 || comp >= r.extents[k]) {
        std::ostringstream os;
        os << "out-of-extent access to " << arrays[std::size_t(r.array)].name << " dim "
           << k << " value " << comp << " in statement " << cs.id;
        fail(ErrorKind::Validation, os.str());
      }
      flat += r.strides[k] * comp;
    }
    return flat;
  }

  std::int64_t logical_flat(const PhysRef& r) const {
    std::int64_t f = r.lconst;
    for (std::size_t t = 0; t < full; ++t) f += r.lcoeffs[t] * z[t];
    return f;
  }

  void violation(const CStmt& cs, const PhysRef& r, std::int64_t expected,
                 std::int64_t found) {
    if (result->violation) return;
    result->violation = true;
    std::ostringstream os;
    os << "dependence violation: statement " << cs.id << " at (";
    for (std::size_t t = 0; t < full; ++t) os << (t ? "," : "") << z[t];
    os << ") reads " << arrays[std::size_t(r.array)].name << " cell " << expected
       << " but storage holds cell " << (found < 0 ? -1 : found);
    result->violation_msg = os.str();
  }

  void exec_stmt(CStmt& cs) {
    stack.clear();
    for (const Op& op : cs.ops) {
      switch (op.k) {
        case Op::K::Lit:
          stack.push_back(op.lit);
          break;
        case Op::K::Aff: {
          std::int64_t v = op.acst;
          for (std::size_t t = 0; t < full; ++t) v += op.ac[t] * z[t];
          stack.push_back(double(v));
          break;
        }
        case Op::K::Read: {
          PhysRef& r = cs.reads[std::size_t(op.ref)];
          std::int64_t flat = phys_flat(r, cs);
          ArrayStore& st = arrays[std::size_t(r.array)];
          if (oracle) {
            std::int64_t want = logical_flat(r);
            std::int64_t have = st.shadow[std::size_t(flat)];
            if (have != want) violation(cs, r, want, have);
          }
          trace(0, r, flat);
          ++result->reads;
          stack.push_back(st.data[std::size_t(flat)]);
          break;
        }
        case Op::K::Add: {
          double b = stack.back();
          stack.pop_back();
          stack.back() += b;
          break;
        }
        case Op::K::Sub: {
          double b = stack.back();
          stack.pop_back();
          stack.back() -= b;
          break;
        }
        case Op::K::Mul: {
          double b = stack.back();
          stack.pop_back();
          stack.back() *= b;
          break;
        }
        case Op::K::Div: {
          double b = stack.back();
          stack.pop_back();
          stack.back() /= b;
          break;
        }
        case Op::K::Min: {
          double b = stack.back();
          stack.pop_back();
          double a = stack.back();
          stack.back() = b < a ? b : a;
          break;
        }
        case Op::K::Max: {
          double b = stack.back();
          stack.pop_back();
          double a = stack.back();
          stack.back() = a < b ? b : a;
          break;
        }
        case Op::K::Neg:
          stack.back() = -stack.back();
          break;
        case Op::K::Sqrt:
          stack.back() = std::sqrt(stack.back());
          break;
      }
    }
    double val = stack.back();
    std::int64_t flat = phys_flat(cs.write, cs);
    ArrayStore& st = arrays[std::size_t(cs.write.array)];
    st.data[std::size_t(flat)] = val;
    if (oracle) st.shadow[std::size_t(flat)] = logical_flat(cs.write);
    trace(1, cs.write, flat);
    ++result->writes;
    ++result->points;
  }

  void run_level(std::size_t k, const OrthantBox& clip, const std::vector<int>& live) {
    auto& cand = cand_buf[k];
    auto& rng = range_buf[k];
    cand.clear();
    std::int64_t lo_all = kNoBound, hi_all = -kNoBound;
    for (int s : live) {
      std::int64_t lo = -kNoBound, hi = kNoBound;
      for (const BRow& br : stmts[std::size_t(s)].levels[k]) {
        std::int64_t v = br.c;
        for (std::size_t j = 0; j < k; ++j) v += br.pre[j] * z[j];
        if (br.a > 0)
          lo = std::max(lo, ceil_div(-v, br.a));
        else
          hi = std::min(hi, floor_div(v, -br.a));
      }
      if (lo == -kNoBound || hi == kNoBound)
        fail(ErrorKind::Unbounded, "Executor: unbounded loop level in " +
                                       stmts[std::size_t(s)].id);
      if (k < clip.dim()) {
        lo = std::max(lo, clip.origin[k]);
        hi = std::min(hi, checked_add(clip.origin[k], clip.size[k]) - 1);
      }
      if (lo > hi) continue;
      rng[std::size_t(s)] = {lo, hi};
      cand.push_back(s);
      lo_all = std::min(lo_all, lo);
      hi_all = std::max(hi_all, hi);
    }
    if (cand.empty()) return;
    auto& next = live_buf[k];
    for (std::int64_t v = lo_all; v <= hi_all; ++v) {
      z[k] = v;
      next.clear();
      for (int s : cand)
        if (rng[std::size_t(s)].first <= v && v <= rng[std::size_t(s)].second)
          next.push_back(s);
      if (next.empty()) continue;
      if (k + 1 == full)
        for (int s : next) exec_stmt(stmts[std::size_t(s)]);
      else
        run_level(k + 1, clip, next);
    }
  }

  ExecResult run_leaves(const std::vector<OrthantBox>& leaves, const ExecOptions& opts) {
    ExecResult res;
    result = &res;
    oracle = opts.check_oracle;
    sink = opts.sink;
    std::vector<int> all;
    for (std::size_t s = 0; s < stmts.size(); ++s)
      if (!stmts[s].dead) all.push_back(int(s));
    for (const auto& leaf : leaves) {
      if (leaf.dim() != band_dim)
        fail(ErrorKind::DimMismatch, "Executor: leaf dimension != band dimension");
      if (full == 0) {
        for (int s : all) exec_stmt(stmts[std::size_t(s)]);
        continue;
      }
      run_level(0, leaf, all);
    }
    flush();
    res.checksum = 0xcbf29ce484222325ULL;
    for (const auto& st : arrays)
      if (st.is_output)
        res.checksum = fnv1a(st.data.data(), st.data.size() * 8, res.checksum);
    result = nullptr;
    return res;
  }
};

Executor::Executor(const Prdg& embedded, const IntVec& params,
                   const std::vector<MemoryMap>& maps)
    : impl_(new Impl(embedded, params, maps)) {}

Executor::~Executor() = default;

ExecResult Executor::run(const TileOrder& order, const ExecOptions& opts) {
  return impl_->run_leaves(order.leaves, opts);
}

ExecResult Executor::run_untiled(const ExecOptions& opts) {
  return impl_->run_leaves({band_bounding_box(impl_->prdg, impl_->params)}, opts);
}

void Executor::reset() { impl_->init_storage(); }

const std::vector<double>& Executor::array_data(const std::string& array) const {
  int i = impl_->array_slot(array);
  if (i < 0) fail(ErrorKind::Validation, "array_data: unknown array " + array);
  return impl_->arrays[std::size_t(i)].data;
}

std::uint64_t Executor::array_base(const std::string& array) const {
  int i = impl_->array_slot(array);
  if (i < 0) fail(ErrorKind::Validation, "array_base: unknown array " + array);
  return impl_->arrays[std::size_t(i)].base;
}

}  // namespace pcot
