#include "pcot/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace pcot {

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Literal:
      return a->literal == b->literal;
    case Expr::Kind::Affine:
      return a->affine == b->affine;
    case Expr::Kind::Read:
      return a->array == b->array && a->subscripts == b->subscripts;
    case Expr::Kind::Bin:
      return a->bop == b->bop && expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    case Expr::Kind::Un:
      return a->uop == b->uop && expr_equal(a->lhs, b->lhs);
  }
  return false;
}

namespace {

struct Parser {
  const std::string& text;
  const ExprScope& scope;
  std::size_t pos = 0;

  [[noreturn]] void err(const std::string& msg) const {
    fail(ErrorKind::Parse, "expression parse error at position " +
                               std::to_string(pos) + ": " + msg + " in \"" + text + "\"");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) err(std::string("expected '") + c + "'");
  }

  bool peek_ident_start() {
    skip_ws();
    return pos < text.size() &&
           (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_');
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) err("expected identifier");
    return text.substr(start, pos - start);
  }

  int var_slot(const std::string& name) const {
    for (std::size_t i = 0; i < scope.indices.size(); ++i)
      if (scope.indices[i] == name) return static_cast<int>(i);
    for (std::size_t j = 0; j < scope.params.size(); ++j)
      if (scope.params[j] == name) return static_cast<int>(scope.indices.size() + j);
    return -1;
  }

  ExprPtr make_affine_var(int slot) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Affine;
    e->affine.coeffs.assign(scope.indices.size() + scope.params.size(), 0);
    e->affine.coeffs[slot] = 1;
    return e;
  }

  ExprPtr make_bin(BinOp op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Bin;
    e->bop = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos >= text.size()) err("unexpected end of input");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      ExprPtr e = parse_sum();
      expect(')');
      return e;
    }
    if (c == '-') {
      ++pos;
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Un;
      e->uop = UnOp::Neg;
      e->lhs = parse_primary();
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(text.substr(pos), &used);
      pos += used;
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Literal;
      e->literal = v;
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = ident();
      if (name == "min" || name == "max") {
        expect('(');
        ExprPtr l = parse_sum();
        expect(',');
        ExprPtr r = parse_sum();
        expect(')');
        return make_bin(name == "min" ? BinOp::Min : BinOp::Max, std::move(l), std::move(r));
      }
      if (name == "sqrt") {
        expect('(');
        ExprPtr arg = parse_sum();
        expect(')');
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Un;
        e->uop = UnOp::Sqrt;
        e->lhs = std::move(arg);
        return e;
      }
      if (eat('[')) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Read;
        e->array = name;
        while (true) {
          e->subscripts.push_back(fold_affine(parse_sum()));
          if (eat(']')) break;
          expect(',');
        }
        return e;
      }
      int slot = var_slot(name);
      if (slot < 0) err("unknown identifier '" + name + "'");
      return make_affine_var(slot);
    }
    err("unexpected character");
  }

  ExprPtr parse_product() {
    ExprPtr e = parse_primary();
    while (true) {
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        e = make_bin(BinOp::Mul, std::move(e), parse_primary());
      } else if (pos < text.size() && text[pos] == '/') {
        ++pos;
        e = make_bin(BinOp::Div, std::move(e), parse_primary());
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_product();
    while (true) {
      skip_ws();
      if (pos < text.size() && text[pos] == '+') {
        ++pos;
        e = make_bin(BinOp::Add, std::move(e), parse_product());
      } else if (pos < text.size() && text[pos] == '-') {
        ++pos;
        e = make_bin(BinOp::Sub, std::move(e), parse_product());
      } else {
        break;
      }
    }
    return e;
  }

  // Reduce an expression tree to an affine form; subscripts and extents must
  // land here.
  AffineExpr fold_affine(const ExprPtr& e) {
    const std::size_t width = scope.indices.size() + scope.params.size();
    AffineExpr r;
    r.coeffs.assign(width, 0);
    switch (e->kind) {
      case Expr::Kind::Literal: {
        double v = e->literal;
        if (v != std::floor(v)) err("non-integer constant in affine context");
        r.constant = static_cast<std::int64_t>(v);
        return r;
      }
      case Expr::Kind::Affine:
        return e->affine;
      case Expr::Kind::Un: {
        if (e->uop != UnOp::Neg) err("non-affine operator in affine context");
        AffineExpr a = fold_affine(e->lhs);
        for (auto& c : a.coeffs) c = checked_sub(0, c);
        a.constant = checked_sub(0, a.constant);
        return a;
      }
      case Expr::Kind::Bin: {
        if (e->bop == BinOp::Add || e->bop == BinOp::Sub) {
          AffineExpr a = fold_affine(e->lhs);
          AffineExpr b = fold_affine(e->rhs);
          for (std::size_t i = 0; i < width; ++i)
            a.coeffs[i] = e->bop == BinOp::Add ? checked_add(a.coeffs[i], b.coeffs[i])
                                               : checked_sub(a.coeffs[i], b.coeffs[i]);
          a.constant = e->bop == BinOp::Add ? checked_add(a.constant, b.constant)
                                            : checked_sub(a.constant, b.constant);
          return a;
        }
        if (e->bop == BinOp::Mul) {
          AffineExpr a = fold_affine(e->lhs);
          AffineExpr b = fold_affine(e->rhs);
          const AffineExpr* var = &a;
          const AffineExpr* cst = &b;
          bool b_const = l1_norm(b.coeffs) == 0;
          bool a_const = l1_norm(a.coeffs) == 0;
          if (!b_const && a_const) std::swap(var, cst);
          else if (!b_const && !a_const) err("non-linear product in affine context");
          AffineExpr out;
          out.coeffs.assign(width, 0);
          for (std::size_t i = 0; i < width; ++i)
            out.coeffs[i] = checked_mul(var->coeffs[i], cst->constant);
          out.constant = checked_mul(var->constant, cst->constant);
          return out;
        }
        err("non-affine operator in affine context");
      }
      default:
        err("array read in affine context");
    }
  }
};

}  // namespace

ExprPtr parse_expr(const std::string& text, const ExprScope& scope) {
  Parser p{text, scope};
  ExprPtr e = p.parse_sum();
  p.skip_ws();
  if (p.pos != text.size()) p.err("trailing input");
  return e;
}

AffineExpr parse_affine(const std::string& text, const ExprScope& scope) {
  Parser p{text, scope};
  ExprPtr e = p.parse_sum();
  p.skip_ws();
  if (p.pos != text.size()) p.err("trailing input");
  return p.fold_affine(e);
}

std::string print_affine(const AffineExpr& a, const ExprScope& scope) {
  std::vector<std::string> names = scope.indices;
  names.insert(names.end(), scope.params.begin(), scope.params.end());
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    std::int64_t c = a.coeffs[i];
    if (c == 0) continue;
    if (first) {
      if (c == -1) os << "-";
      else if (c != 1) os << c << "*";
    } else {
      os << (c > 0 ? " + " : " - ");
      std::int64_t m = c > 0 ? c : -c;
      if (m != 1) os << m << "*";
    }
    os << names[i];
    first = false;
  }
  if (first) {
    os << a.constant;
  } else if (a.constant != 0) {
    os << (a.constant > 0 ? " + " : " - ")
       << (a.constant > 0 ? a.constant : -a.constant);
  }
  return os.str();
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  std::string s = os.str();
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

int precedence(const ExprPtr& e) {
  if (e->kind == Expr::Kind::Bin) {
    switch (e->bop) {
      case BinOp::Add:
      case BinOp::Sub:
        return 1;
      case BinOp::Mul:
      case BinOp::Div:
        return 2;
      default:
        return 3;
    }
  }
  return 3;
}

void print_rec(const ExprPtr& e, const ExprScope& scope, int parent_prec,
               std::string& out) {
  switch (e->kind) {
    case Expr::Kind::Literal:
      out += fmt_double(e->literal);
      return;
    case Expr::Kind::Affine: {
      std::string s = print_affine(e->affine, scope);
      bool atomic = s.find(' ') == std::string::npos;
      if (!atomic && parent_prec >= 2) out += "(" + s + ")";
      else out += s;
      return;
    }
    case Expr::Kind::Read: {
      out += e->array;
      out += "[";
      for (std::size_t i = 0; i < e->subscripts.size(); ++i) {
        if (i) out += ",";
        out += print_affine(e->subscripts[i], scope);
      }
      out += "]";
      return;
    }
    case Expr::Kind::Un:
      if (e->uop == UnOp::Sqrt) {
        out += "sqrt(";
        print_rec(e->lhs, scope, 0, out);
        out += ")";
      } else {
        out += "-";
        print_rec(e->lhs, scope, 3, out);
      }
      return;
    case Expr::Kind::Bin: {
      if (e->bop == BinOp::Min || e->bop == BinOp::Max) {
        out += e->bop == BinOp::Min ? "min(" : "max(";
        print_rec(e->lhs, scope, 0, out);
        out += ", ";
        print_rec(e->rhs, scope, 0, out);
        out += ")";
        return;
      }
      int prec = precedence(e);
      bool paren = prec < parent_prec;
      if (paren) out += "(";
      print_rec(e->lhs, scope, prec, out);
      switch (e->bop) {
        case BinOp::Add: out += " + "; break;
        case BinOp::Sub: out += " - "; break;
        case BinOp::Mul: out += "*"; break;
        case BinOp::Div: out += "/"; break;
        default: break;
      }
      // Right operand of - and / needs the next binding level to round-trip.
      print_rec(e->rhs, scope,
                (e->bop == BinOp::Sub || e->bop == BinOp::Div) ? prec + 1 : prec, out);
      if (paren) out += ")";
      return;
    }
  }
}

}  // namespace

std::string print_expr(const ExprPtr& e, const ExprScope& scope) {
  std::string out;
  print_rec(e, scope, 0, out);
  return out;
}

}  // namespace pcot
