#include "pcot/emit_c.hpp"

#include <cctype>
#include <cstdio>
#include <optional>
#include <sstream>

#include "pcot/exec.hpp"
#include "pcot/memalloc.hpp"
#include "pcot/tiler.hpp"

namespace pcot {

namespace {

std::string sanitize(const std::string& s) {
  std::string r;
  for (char c : s)
    r += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  if (r.empty() || std::isdigit(static_cast<unsigned char>(r[0]))) r = "v" + r;
  return r;
}

/// "3*t - 2*i + 5" over the given variable names; "0" when everything is zero.
std::string lin_str(const IntVec& co, std::int64_t cst,
                    const std::vector<std::string>& names) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < co.size(); ++i) {
    if (co[i] == 0) continue;
    std::int64_t a = co[i];
    if (first) {
      if (a == -1)
        os << "-";
      else if (a != 1)
        os << a << "*";
    } else {
      os << (a < 0 ? " - " : " + ");
      std::int64_t m = a < 0 ? -a : a;
      if (m != 1) os << m << "*";
    }
    os << names[i];
    first = false;
  }
  if (cst != 0 || first) {
    if (first)
      os << cst;
    else
      os << (cst < 0 ? " - " : " + ") << (cst < 0 ? -cst : cst);
  }
  return os.str();
}

struct Emitter {
  const Prdg& p;
  const IntVec& params;
  const std::vector<MemoryMap>& maps;
  const EmitOptions& opts;
  std::size_t full, d;
  std::vector<std::string> idx_names;
  OrthantBox bbox;          // full-depth union of statement bounding boxes
  BoxEmptiness emptiness;
  std::ostringstream out;

  const MemoryMap& map_of(const std::string& name) const {
    for (const auto& m : maps)
      if (m.array == name) return m;
    fail(ErrorKind::Validation, "emit_c: no memory map for array " + name);
  }

  std::string idx_call(const std::string& array, const std::vector<AffineExpr>& subs) const {
    std::ostringstream os;
    os << "IDX_" << sanitize(array) << "(";
    for (std::size_t i = 0; i < subs.size(); ++i) {
      AffineExpr b = bind_affine_params(subs[i], full, params);
      os << (i ? ", " : "") << lin_str(b.coeffs, b.constant, idx_names);
    }
    os << ")";
    return os.str();
  }

  std::string expr_c(const ExprPtr& e) const {
    switch (e->kind) {
      case Expr::Kind::Literal: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", e->literal);
        std::string s = buf;
        if (s.find_first_of(".eEnix") == std::string::npos) s += ".0";
        return s;
      }
      case Expr::Kind::Affine: {
        AffineExpr b = bind_affine_params(e->affine, full, params);
        return "(double)(" + lin_str(b.coeffs, b.constant, idx_names) + ")";
      }
      case Expr::Kind::Read:
        return "A_" + sanitize(e->array) + "[" + idx_call(e->array, e->subscripts) + "]";
      case Expr::Kind::Bin: {
        std::string a = expr_c(e->lhs), b = expr_c(e->rhs);
        switch (e->bop) {
          case BinOp::Add: return "(" + a + " + " + b + ")";
          case BinOp::Sub: return "(" + a + " - " + b + ")";
          case BinOp::Mul: return "(" + a + " * " + b + ")";
          case BinOp::Div: return "(" + a + " / " + b + ")";
          case BinOp::Min: return "((" + b + ") < (" + a + ") ? (" + b + ") : (" + a + "))";
          case BinOp::Max: return "((" + a + ") < (" + b + ") ? (" + b + ") : (" + a + "))";
        }
        return "";
      }
      case Expr::Kind::Un:
        return e->uop == UnOp::Neg ? "(-(" + expr_c(e->lhs) + "))"
                                   : "sqrt(" + expr_c(e->lhs) + ")";
    }
    return "";
  }

  void emit_prelude() {
    out << "/* " << p.name << " specialized to";
    for (std::size_t j = 0; j < p.params.size(); ++j)
      out << " " << p.params[j] << "=" << params[j];
    out << " */\n"
        << "#include <stdint.h>\n#include <stdio.h>\n#include <stdlib.h>\n"
        << "#include <string.h>\n#include <math.h>\n\n"
        << "static inline int64_t pmod(int64_t a, int64_t m) {\n"
        << "  int64_t r = a % m;\n  return r < 0 ? r + m : r;\n}\n"
        << "static inline int64_t i64max(int64_t a, int64_t b) { return a < b ? b : a; }\n"
        << "static inline int64_t i64min(int64_t a, int64_t b) { return a < b ? a : b; }\n\n"
        << "static uint64_t nodes = 0, leaves = 0;\n"
        << "static int64_t b[" << d << "];\n\n";
  }

  void emit_arrays() {
    for (const auto& a : p.arrays) {
      const MemoryMap& m = map_of(a.name);
      std::string an = sanitize(a.name);
      out << "static double *A_" << an << "; /* " << m.words() << " doubles */\n";
      // Cell -> flat storage index under the memory map.
      IntVec strides(m.extents.size(), 1);
      for (std::size_t k = m.extents.size(); k-- > 1;)
        strides[k - 1] = checked_mul(strides[k], m.extents[k]);
      out << "#define IDX_" << an << "(";
      for (std::size_t j = 0; j < a.rank; ++j) out << (j ? ", " : "") << "c" << j;
      out << ") (";
      std::vector<std::string> cn;
      for (std::size_t j = 0; j < a.rank; ++j) cn.push_back("(c" + std::to_string(j) + ")");
      for (std::size_t k = 0; k < m.extents.size(); ++k) {
        std::string comp = lin_str(m.map.linear[k], m.map.constant[k], cn);
        if (m.moduli[k] > 0)
          comp = "pmod(" + comp + ", " + std::to_string(m.moduli[k]) + ")";
        else
          comp = "(" + comp + ")";
        out << (k ? " + " : "") << comp;
        if (strides[k] != 1) out << "*" << strides[k];
      }
      out << ")\n";
    }
    out << "\n";
  }

  void emit_init_value() {
    out << "static double init_value(uint64_t h, uint64_t flat) {\n"
        << "  uint64_t x = h ^ (flat * 0x9E3779B97F4A7C15ULL);\n"
        << "  x += 0x9E3779B97F4A7C15ULL;\n"
        << "  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;\n"
        << "  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;\n"
        << "  x ^= x >> 31;\n"
        << "  return (double)(x >> 11) * 0x1.0p-53;\n}\n\n"
        << "static uint64_t fnv1a(const void *p, size_t n, uint64_t h) {\n"
        << "  const unsigned char *b = (const unsigned char *)p;\n"
        << "  for (size_t i = 0; i < n; ++i) { h ^= b[i]; h *= 0x100000001b3ULL; }\n"
        << "  return h;\n}\n\n";
  }

  void emit_nonempty() {
    // Same symbolic emptiness rows the tiler evaluates, so pruning matches.
    out << "static int box_nonempty(const int64_t o[" << d << "], const int64_t s["
        << d << "]) {\n";
    std::vector<std::string> names;
    for (std::size_t i = 0; i < d; ++i) names.push_back("o[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < d; ++i) names.push_back("s[" + std::to_string(i) + "]");
    for (const auto& rows : emptiness.stmt_rows) {
      out << "  if (1";
      for (const auto& row : rows) {
        IntVec co(row.begin(), row.end() - 1);
        out << "\n      && " << lin_str(co, row.back(), names) << " >= 0";
      }
      out << ") return 1;\n";
    }
    out << "  return 0;\n}\n\n";
  }

  void emit_base() {
    out << "static void base(const int64_t o[" << d << "], const int64_t s[" << d
        << "]) {\n  leaves++;\n";
    std::string ind = "  ";
    for (std::size_t k = 0; k < full; ++k) {
      const std::string& v = idx_names[k];
      std::int64_t lo = bbox.origin[k];
      std::int64_t hi = checked_add(bbox.origin[k], bbox.size[k]) - 1;
      out << ind << "for (int64_t " << v << " = ";
      if (k < d)
        out << "i64max(" << lo << ", o[" << k << "]); " << v << " <= i64min(" << hi
            << ", o[" << k << "] + s[" << k << "] - 1)";
      else
        out << lo << "; " << v << " <= " << hi;
      out << "; ++" << v << ")\n";
      ind += "  ";
    }
    out << ind << "{\n";
    ind += "  ";
    for (const auto& s : p.statements) {
      Domain bd = bind_params(s.domain, params);
      out << ind << "{ /* " << s.id << " */\n";
      out << ind << "  if (1";
      for (const auto& row : bd.rows) {
        IntVec co(row.begin(), row.end() - 1);
        out << "\n" << ind << "      && " << lin_str(co, row.back(), idx_names) << " >= 0";
      }
      out << ")\n";
      out << ind << "    A_" << sanitize(s.writes.array) << "["
          << idx_call(s.writes.array, s.writes.subscripts) << "] = " << expr_c(s.body)
          << ";\n";
      out << ind << "}\n";
    }
    ind.resize(ind.size() - 2);
    out << ind << "}\n";
    out << "}\n\n";
  }

  void emit_rec() {
    const std::size_t nchild = std::size_t(1) << d;
    out << "static void rec(const int64_t o[" << d << "], const int64_t s[" << d
        << "]) {\n";
    if (opts.openmp) out << "#pragma omp atomic\n";
    out << "  nodes++;\n"
        << "  int leaf = 1;\n"
        << "  for (int i = 0; i < " << d << "; ++i)\n"
        << "    if (s[i] > b[i]) leaf = 0;\n"
        << "  if (leaf) { base(o, s); return; }\n"
        << "  int64_t half[" << d << "];\n"
        << "  for (int i = 0; i < " << d << "; ++i)\n"
        << "    half[i] = s[i] > b[i] ? (s[i] + 1) / 2 : s[i];\n";
    // Children by wavefront phase (bit count), bit order within a phase;
    // dimension 0 is the most significant orthant bit.
    out << "  for (int phase = 0; phase <= " << d << "; ++phase) {\n"
        << "    for (unsigned idx = 0; idx < " << nchild << "u; ++idx) {\n"
        << "      if (__builtin_popcount(idx) != phase) continue;\n"
        << "      int64_t o2[" << d << "], s2[" << d << "];\n"
        << "      int zero = 0;\n"
        << "      for (int i = 0; i < " << d << "; ++i) {\n"
        << "        int second = (idx >> (" << d - 1 << " - i)) & 1;\n"
        << "        o2[i] = second ? o[i] + half[i] : o[i];\n"
        << "        s2[i] = second ? s[i] - half[i] : half[i];\n"
        << "        if (s2[i] == 0) zero = 1;\n"
        << "      }\n"
        << "      if (zero || !box_nonempty(o2, s2)) continue;\n";
    if (opts.openmp)
      out << "#pragma omp task firstprivate(o2, s2)\n";
    out << "      rec(o2, s2);\n"
        << "    }\n";
    if (opts.openmp) out << "#pragma omp taskwait\n";
    out << "  }\n}\n\n";
  }

  void emit_main() {
    out << "int main(int argc, char **argv) {\n"
        << "  int dump = 0;\n"
        << "  int nb = 0;\n"
        << "  for (int i = 1; i < argc; ++i) {\n"
        << "    if (strcmp(argv[i], \"--dump\") == 0) { dump = 1; continue; }\n"
        << "    if (nb < " << d << ") b[nb++] = strtoll(argv[i], NULL, 10);\n"
        << "    else { fprintf(stderr, \"usage: %s [b0..b" << d - 1
        << "] [--dump]\\n\", argv[0]); return 2; }\n"
        << "  }\n";
    out << "  const int64_t bdef[" << d << "] = {";
    for (std::size_t i = 0; i < d; ++i)
      out << (i ? ", " : "")
          << (i < opts.leaf_defaults.size() ? opts.leaf_defaults[i] : 4);
    out << "};\n"
        << "  for (int i = 0; i < " << d << "; ++i) {\n"
        << "    if (i >= nb) b[i] = bdef[i];\n"
        << "    if (b[i] <= 0) { fprintf(stderr, \"leaf sizes must be positive\\n\"); return 2; }\n"
        << "  }\n";
    for (const auto& a : p.arrays) {
      const MemoryMap& m = map_of(a.name);
      std::string an = sanitize(a.name);
      out << "  A_" << an << " = calloc(" << m.words() << ", sizeof(double));\n"
          << "  if (!A_" << an << ") return 3;\n";
      if (a.kind == ArrayKind::Input)
        out << "  for (uint64_t f = 0; f < " << m.words() << "ULL; ++f)\n"
            << "    A_" << an << "[f] = init_value(0x" << std::hex
            << fnv1a(a.name.data(), a.name.size()) << std::dec << "ULL, f);\n";
    }
    // Starter: pad the band bounding box to leaf * 2^k per dimension.
    out << "  int64_t o[" << d << "], s[" << d << "];\n";
    for (std::size_t i = 0; i < d; ++i) {
      out << "  o[" << i << "] = " << bbox.origin[i] << ";\n"
          << "  s[" << i << "] = b[" << i << "];\n"
          << "  while (s[" << i << "] < " << bbox.size[i] << ") s[" << i << "] *= 2;\n";
    }
    if (opts.openmp)
      out << "#pragma omp parallel\n#pragma omp single\n";
    out << "  rec(o, s);\n"
        << "  uint64_t h = 0xcbf29ce484222325ULL;\n";
    for (const auto& a : p.arrays)
      if (a.kind == ArrayKind::Output) {
        const MemoryMap& m = map_of(a.name);
        out << "  h = fnv1a(A_" << sanitize(a.name) << ", " << m.words()
            << "ULL * 8, h);\n";
      }
    out << "  printf(\"CHECKSUM %016llx\\n\", (unsigned long long)h);\n"
        << "  printf(\"NODES %llu\\n\", (unsigned long long)nodes);\n"
        << "  printf(\"LEAVES %llu\\n\", (unsigned long long)leaves);\n"
        << "  if (dump) {\n";
    for (const auto& a : p.arrays)
      if (a.kind == ArrayKind::Output) {
        const MemoryMap& m = map_of(a.name);
        std::string an = sanitize(a.name);
        out << "    printf(\"ARRAY " << a.name << "\\n\");\n"
            << "    for (uint64_t f = 0; f < " << m.words() << "ULL; ++f) {\n"
            << "      uint64_t bits;\n"
            << "      memcpy(&bits, &A_" << an << "[f], 8);\n"
            << "      printf(\"%016llx\\n\", (unsigned long long)bits);\n"
            << "    }\n";
      }
    out << "  }\n  return 0;\n}\n";
  }

  std::string run() {
    emit_prelude();
    emit_arrays();
    emit_init_value();
    emit_nonempty();
    emit_base();
    emit_rec();
    emit_main();
    return out.str();
  }
};

}  // namespace

std::string emit_c(const Prdg& p0, const IntVec& params, const EmitOptions& opts) {
  Prdg embedded;
  std::vector<MemoryMap> maps;
  if (opts.use_alloc) {
    AllocResult ar = allocate(p0, params);
    embedded = std::move(ar.transformed);
    maps = std::move(ar.maps);
  } else {
    embedded = p0.is_perfect() ? p0 : embed(p0);
    maps = single_assignment_maps(embedded, params);
  }

  Emitter em{embedded, params, maps, opts, embedded.indices.size(),
             embedded.tilable_band.size(), {}, {}, {}, {}};
  for (const auto& n : embedded.indices) em.idx_names.push_back(sanitize(n));

  // Full-depth union bounding box of the statement domains.
  std::optional<OrthantBox> acc;
  for (const auto& s : embedded.statements) {
    Domain bd = bind_params(s.domain, params);
    if (is_empty_rational(bd, {})) continue;
    OrthantBox bb = bounding_box(bd, {});
    if (!acc) {
      acc = bb;
    } else {
      for (std::size_t i = 0; i < bb.dim(); ++i) {
        std::int64_t lo = std::min(acc->origin[i], bb.origin[i]);
        std::int64_t hi = std::max(checked_add(acc->origin[i], acc->size[i]),
                                   checked_add(bb.origin[i], bb.size[i]));
        acc->origin[i] = lo;
        acc->size[i] = checked_sub(hi, lo);
      }
    }
  }
  if (!acc) fail(ErrorKind::Validation, "emit_c: all statement domains are empty");
  em.bbox = *acc;
  em.emptiness = make_box_emptiness(embedded, params);
  return em.run();
}

}  // namespace pcot
