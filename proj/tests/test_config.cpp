#include <sstream>

#include "doctest.h"
#include "lexvar/config.hpp"
#include "lexvar/util.hpp"

using namespace lexvar;

TEST_CASE("defaults and file loading") {
  Config c;
  CHECK(c.get_int("sample_size") == 80000);
  CHECK(c.get("wsi_method") == "kmeans");
  std::stringstream in("# comment\nseed = 7  # trailing\n\nsemeval_methods = kmeans, spectral\n");
  c.load(in);
  CHECK(c.get_int("seed") == 7);
  CHECK(c.get_list("semeval_methods") == std::vector<std::string>{"kmeans", "spectral"});
  c.validate();
}

TEST_CASE("bad input is rejected with the key name") {
  Config c;
  std::stringstream unknown("nonsense = 1\n");
  CHECK_THROWS_AS(c.load(unknown), Error);
  std::stringstream no_eq("seed 7\n");
  CHECK_THROWS_AS(c.load(no_eq), Error);
  c.set("jobs", "two");
  try {
    c.get_int("jobs");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("jobs") != std::string::npos);
  }
  Config d;
  d.set("percentile", "150");
  CHECK_THROWS_AS(d.validate(), Error);
  Config m;
  m.set("wsi_method", "lda");
  CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("hash ignores jobs and out but nothing else") {
  Config a, b;
  b.set("jobs", "8");
  b.set("out", "elsewhere");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.set("seed", "1");
  CHECK(a.hash() != b.hash());
}

TEST_CASE("resolved config lists every key") {
  Config c;
  std::ostringstream out;
  c.write_resolved(out);
  const auto text = out.str();
  for (const auto& [key, entry] : Config::schema()) CHECK(text.find(key + " = ") != std::string::npos);
  CHECK(text.find(c.hash()) != std::string::npos);
}
