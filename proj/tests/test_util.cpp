#include <atomic>
#include <cstdlib>
#include <set>

#include "doctest.h"
#include "lexvar/util.hpp"

using namespace lexvar;

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("seed derivation is stable and tag sensitive") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  CHECK(derive_seed(7, 1, 2) != derive_seed(7, 2, 1));
  // FNV-1a of the empty string is the offset basis.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("Rng draws stay in range and repeat under a seed") {
  Rng a(42), b(42);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.uniform_index(7);
    CHECK(x < 7);
    CHECK(x == b.uniform_index(7));
    seen.insert(x);
    const double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    b.uniform01();
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("Rng normal draws have unit variance") {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.03));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("split and trim") {
  CHECK(split("a\t\tb", '\t') == std::vector<std::string>{"a", "", "b"});
  CHECK(trim("  x y \n") == "x y");
  CHECK(to_lower_ascii("AbC") == "abc");
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw Error("boom");
                               }),
                  Error);
}
