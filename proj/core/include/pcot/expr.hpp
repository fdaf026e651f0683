#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pcot/affine.hpp"

namespace pcot {

/// Affine combination of index variables and parameters plus a constant.
/// coeffs has one entry per index followed by one per parameter.
struct AffineExpr {
  IntVec coeffs;
  std::int64_t constant = 0;

  std::int64_t eval(const IntVec& x, const IntVec& p) const {
    if (coeffs.size() != x.size() + p.size())
      fail(ErrorKind::DimMismatch, "AffineExpr::eval");
    std::int64_t s = constant;
    for (std::size_t i = 0; i < x.size(); ++i)
      s = checked_add(s, checked_mul(coeffs[i], x[i]));
    for (std::size_t j = 0; j < p.size(); ++j)
      s = checked_add(s, checked_mul(coeffs[x.size() + j], p[j]));
    return s;
  }

  bool operator==(const AffineExpr& o) const = default;
};

/// Fold parameter values into the constant; result has index coeffs only.
inline AffineExpr bind_affine_params(const AffineExpr& a, std::size_t nidx,
                                     const IntVec& params) {
  if (a.coeffs.size() != nidx + params.size())
    fail(ErrorKind::DimMismatch, "bind_affine_params: coefficient width");
  AffineExpr r;
  r.coeffs.assign(a.coeffs.begin(), a.coeffs.begin() + nidx);
  r.constant = a.constant;
  for (std::size_t j = 0; j < params.size(); ++j)
    r.constant = checked_add(r.constant, checked_mul(a.coeffs[nidx + j], params[j]));
  return r;
}

enum class BinOp { Add, Sub, Mul, Div, Min, Max };
enum class UnOp { Neg, Sqrt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Statement body expression tree. Scalar index/param uses are folded into
/// Affine leaves so subscripts and scalar arithmetic share one representation.
struct Expr {
  enum class Kind { Literal, Affine, Read, Bin, Un };
  Kind kind;
  double literal = 0.0;
  AffineExpr affine;                   // Kind::Affine
  std::string array;                   // Kind::Read
  std::vector<AffineExpr> subscripts;  // Kind::Read
  BinOp bop = BinOp::Add;
  UnOp uop = UnOp::Neg;
  ExprPtr lhs, rhs;
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// Names visible to the body grammar: indices first, then parameters.
struct ExprScope {
  std::vector<std::string> indices;
  std::vector<std::string> params;
};

/// Parse the infix body grammar. Throws ErrorKind::Parse with a character
/// position on malformed input.
ExprPtr parse_expr(const std::string& text, const ExprScope& scope);

/// Parse a subscript/extent string that must reduce to an affine expression.
AffineExpr parse_affine(const std::string& text, const ExprScope& scope);

/// Print back into the body grammar (parse(print_expr(e)) == e structurally).
std::string print_expr(const ExprPtr& e, const ExprScope& scope);
std::string print_affine(const AffineExpr& a, const ExprScope& scope);

}  // namespace pcot
