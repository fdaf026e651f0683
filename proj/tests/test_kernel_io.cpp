#include <cstdlib>

#include "doctest.h"
#include "helpers.hpp"
#include "pcot/kernel_io.hpp"

using namespace pcot;

static const char* kCorpus[] = {"heat1d-fig7", "heat2d", "heat3d",
                                "triangle",    "lud",    "osp"};

TEST_CASE("corpus kernels parse, validate, and round-trip") {
  for (const char* name : kCorpus) {
    CAPTURE(name);
    Prdg p = pcot_test::load_corpus(name);
    CHECK(p.name == name);
    CHECK(!p.statements.empty());
    CHECK(!p.edges.empty());
    CHECK(!p.tilable_band.empty());
    Prdg q = parse_kernel(print_kernel(p));
    CHECK(p == q);
  }
}

TEST_CASE("malformed kernels are rejected with the right error kind") {
  try {
    parse_kernel("{not json");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
  }

  // Structurally valid JSON, semantically broken: body reads an undeclared
  // array.
  const char* bad = R"({
    "name": "bad", "params": ["N"], "indices": ["i"],
    "check_params": {"N": 4},
    "arrays": [{"name": "A", "rank": 1, "extents": ["N"], "kind": "output"}],
    "statements": [{
      "id": "S", "depth": 1, "domain": [[1, 0, 0], [-1, 1, -1]],
      "writes": {"array": "A", "subscripts": ["i"]},
      "body": "Ghost[i]"
    }],
    "edges": [], "tilable_band": [0]
  })";
  try {
    parse_kernel(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
  }
}

TEST_CASE("find_kernel_file honors PCOT_KERNEL_PATH and suffixes") {
  setenv("PCOT_KERNEL_PATH", PCOT_KERNELS_DIR, 1);
  CHECK(!find_kernel_file("heat2d").empty());
  CHECK(!find_kernel_file("heat2d.kernel").empty());
  CHECK(find_kernel_file("does-not-exist").empty());
  std::string direct = std::string(PCOT_KERNELS_DIR) + "/lud.kernel";
  CHECK(find_kernel_file(direct) == direct);
}
