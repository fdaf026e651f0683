#include "doctest.h"
#include "pcot/expr.hpp"

using namespace pcot;

static const ExprScope kScope{{"t", "i"}, {"N"}};

TEST_CASE("parse_expr / print_expr round-trip") {
  const char* bodies[] = {
      "0.25 * (X[t - 1, i - 1] + X[t - 1, i] + X[t - 1, i + 1])",
      "min(A[t, i], B[t, i - 1] + 1.5)",
      "max(t - i, 0) + N",
      "A[t, i] / (B[t, i] - 2)",
      "-X[t - 1, 0] + sqrt(Y[t, i])",
  };
  for (const char* b : bodies) {
    ExprPtr e = parse_expr(b, kScope);
    std::string printed = print_expr(e, kScope);
    ExprPtr e2 = parse_expr(printed, kScope);
    CHECK(expr_equal(e, e2));
  }
}

TEST_CASE("parse_affine evaluates correctly") {
  AffineExpr a = parse_affine("2 * t - i + 3 * N + 1", kScope);
  CHECK(a.eval({5, 2}, {10}) == 2 * 5 - 2 + 3 * 10 + 1);
  AffineExpr zero = parse_affine("0", kScope);
  CHECK(zero.eval({1, 2}, {3}) == 0);
}

TEST_CASE("parse errors carry ErrorKind::Parse") {
  CHECK_THROWS_AS(parse_expr("t +", kScope), Error);
  CHECK_THROWS_AS(parse_expr("unknown_var", kScope), Error);
  CHECK_THROWS_AS(parse_affine("t * i", kScope), Error);  // not affine
  try {
    parse_expr("((t)", kScope);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
  }
}

TEST_CASE("affine folding collects coefficients in scope order") {
  AffineExpr a = parse_affine("t + 2 * i - N", kScope);
  CHECK(a.coeffs == IntVec{1, 2, -1});
  CHECK(a.constant == 0);
  AffineExpr b = parse_affine("-(t - 1) + i", kScope);
  CHECK(b.coeffs == IntVec{-1, 1, 0});
  CHECK(b.constant == 1);
}
