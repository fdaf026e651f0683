#include <random>

#include "doctest.h"
#include "pcot/domain.hpp"
#include "pcot/prdg.hpp"

using namespace pcot;

namespace {

// Random bounded domain that always contains the origin: a box [0, K)^d plus
// extra rows whose constant is lifted so they hold at 0.
Domain random_domain(std::mt19937_64& rng, std::size_t d, std::int64_t K, int extra) {
  Domain dom;
  dom.index_dim = d;
  dom.param_dim = 0;
  for (std::size_t i = 0; i < d; ++i) {
    IntVec lo(d + 1, 0), hi(d + 1, 0);
    lo[i] = 1;
    hi[i] = -1;
    hi[d] = K - 1;
    dom.rows.push_back(lo);
    dom.rows.push_back(hi);
  }
  std::uniform_int_distribution<std::int64_t> coef(-3, 3);
  for (int e = 0; e < extra; ++e) {
    IntVec r(d + 1, 0);
    for (std::size_t i = 0; i < d; ++i) r[i] = coef(rng);
    r[d] = 0;  // holds at the origin with equality
    dom.rows.push_back(r);
  }
  return dom;
}

}  // namespace

TEST_CASE("bounding_box matches enumeration extremes on random domains") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 60; ++it) {
    std::size_t d = 2 + (it % 2);
    Domain dom = random_domain(rng, d, 6, 3);
    auto pts = enumerate_points(dom, {});
    REQUIRE(!pts.empty());  // origin is always inside
    OrthantBox bb = bounding_box(dom, {});
    IntVec lo(d, INT64_MAX), hi(d, INT64_MIN);
    for (const auto& p : pts)
      for (std::size_t i = 0; i < d; ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
    for (std::size_t i = 0; i < d; ++i) {
      // The box must contain every integer point; rational relaxation may
      // make it slightly larger but never smaller.
      CHECK(bb.origin[i] <= lo[i]);
      CHECK(bb.origin[i] + bb.size[i] - 1 >= hi[i]);
    }
  }
}

TEST_CASE("fm_project is a sound shadow: projected points satisfy it") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 40; ++it) {
    Domain dom = random_domain(rng, 3, 5, 2);
    auto pts = enumerate_points(dom, {});
    Domain proj = fm_project(dom, {2});  // drop the last index
    REQUIRE(proj.index_dim == 2);
    for (const auto& p : pts) CHECK(proj.contains({p[0], p[1]}, {}));
  }
}

TEST_CASE("fm_eliminate_column keeps every satisfying point satisfying") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 40; ++it) {
    Domain dom = random_domain(rng, 3, 5, 3);
    auto elim = fm_eliminate_column(dom.rows, 1, dom.row_len());
    for (const auto& p : enumerate_points(dom, {})) {
      for (const auto& r : elim) {
        // Eliminated rows have a zero coefficient at column 1.
        CHECK(r[1] == 0);
        CHECK(r[0] * p[0] + r[2] * p[2] + r[3] >= 0);
      }
    }
  }
}

TEST_CASE("intersect and contains agree with row concatenation") {
  std::mt19937_64 rng(17);
  Domain a = random_domain(rng, 2, 8, 2);
  Domain b = random_domain(rng, 2, 6, 2);
  Domain c = intersect(a, b);
  for (std::int64_t x = -1; x < 9; ++x)
    for (std::int64_t y = -1; y < 9; ++y) {
      IntVec p{x, y};
      CHECK(c.contains(p, {}) == (a.contains(p, {}) && b.contains(p, {})));
    }
}

TEST_CASE("domain_from_box round-trips through bounding_box") {
  OrthantBox box{{2, -3}, {5, 7}};
  Domain d = domain_from_box(box);
  CHECK(bounding_box(d, {}) == box);
  CHECK(d.contains({2, -3}, {}));
  CHECK(d.contains({6, 3}, {}));
  CHECK(!d.contains({7, 0}, {}));
  CHECK(!d.contains({2, 4}, {}));
}

TEST_CASE("is_empty_rational detects contradictions") {
  Domain d;
  d.index_dim = 1;
  d.param_dim = 0;
  d.rows = {{1, 0}, {-1, -1}};  // x >= 0 and x <= -1
  CHECK(is_empty_rational(d));
  d.rows = {{1, 0}, {-1, 5}};
  CHECK(!is_empty_rational(d));
}

TEST_CASE("extend_indices appends zero columns") {
  Domain d;
  d.index_dim = 1;
  d.param_dim = 1;
  d.rows = {{1, -1, 2}};
  Domain e = extend_indices(d, 3);
  REQUIRE(e.index_dim == 3);
  REQUIRE(e.rows.size() == 1);
  CHECK(e.rows[0] == IntVec{1, 0, 0, -1, 2});
}
