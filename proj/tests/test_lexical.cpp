#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lexvar/lexical.hpp"

using namespace lexvar;

namespace {

// Community A: a used by 3 users, b by 1. Community B: a by 1, c by 3.
FrequencyTable toy_table() {
  FrequencyTable t;
  t.add_community("A", {{"a", 3}, {"b", 1}});
  t.add_community("B", {{"a", 1}, {"c", 3}});
  return t;
}

CorpusSlice slice_of(std::vector<std::pair<std::string, std::vector<std::string>>> rows) {
  CorpusSlice s;
  s.community = "s";
  int i = 0;
  for (auto& [author, tokens] : rows) {
    Comment c;
    c.id = "c" + std::to_string(i++);
    c.community = "s";
    c.author = author;
    c.tokens = tokens;
    s.comments.push_back(c);
  }
  return s;
}

}  // namespace

TEST_CASE("users are counted once per token") {
  const auto s = slice_of({{"u1", {"x", "x", "y"}}, {"u1", {"x"}}, {"u2", {"x"}}});
  const auto counts = count_users(s);
  CHECK(counts.at("x") == 2);
  CHECK(counts.at("y") == 1);
}

TEST_CASE("frequency table marginals") {
  const auto t = toy_table();
  CHECK(t.community_total("A") == 4);
  CHECK(t.grand_total() == 8);
  CHECK(t.global_count("a") == 4);
  CHECK(t.doc_freq("a") == 2);
  CHECK(t.doc_freq("c") == 1);
  CHECK(t.count("A", "c") == 0);
  CHECK(t.community_counts("Z").empty());
}

TEST_CASE("PMI and NPMI by hand") {
  const auto t = toy_table();
  // P(a|A) = 3/4, P(a) = 4/8, P(A, a) = 3/8.
  const auto s = score_pmi_npmi(t, "A", "a");
  CHECK(s.pmi == doctest::Approx(0.4054651).epsilon(1e-6));
  CHECK(s.npmi == doctest::Approx(0.4054651 / 0.9808293).epsilon(1e-6));
  // P(c|B) = 3/4, P(c) = 3/8: PMI = ln 2.
  CHECK(score_pmi_npmi(t, "B", "c").pmi == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(score_pmi_npmi(t, "A", "c"), UndefinedScore);
  const auto only = npmi_from_counts(1, 1, 1, 1);
  CHECK(only.npmi == 1.0);
}

TEST_CASE("tf-idf by hand") {
  const auto t = toy_table();
  CHECK(score_tfidf(t, "A", "a") == doctest::Approx(0.0));
  CHECK(score_tfidf(t, "A", "b") == doctest::Approx(std::log10(2.0)));
  CHECK(score_tfidf(t, "B", "c") == doctest::Approx((1.0 + std::log10(3.0)) * std::log10(2.0)));
}

TEST_CASE("signed JSD by hand") {
  const auto t = toy_table();
  // p = 3/4 in A, q = 1/4 in B; m = 1/2.
  CHECK(score_jsd(t, "A", "a") == doctest::Approx(0.0943609).epsilon(1e-6));
  // c absent from A, q = 3/4: contribution 3/8, negative.
  CHECK(score_jsd(t, "A", "c") == doctest::Approx(-0.375));
  CHECK(score_jsd(t, "B", "c") == doctest::Approx(0.375));
}

TEST_CASE("top fraction keeps boundary ties") {
  FrequencyTable::Counts counts{{"a", 5}, {"b", 4}, {"c", 4}, {"d", 1}, {"e", 1}};
  // ceil(0.2 * 5) = 1
  CHECK(top_fraction_tokens(counts, 0.2) == std::vector<std::string>{"a"});
  // ceil(0.4 * 5) = 2, tie at 4 pulls in c
  CHECK(top_fraction_tokens(counts, 0.4) == std::vector<std::string>{"a", "b", "c"});
  FrequencyTable t;
  t.add_community("s", counts);
  CHECK(select_type_vocab(t, "s", {0.4, 5}) == std::vector<std::string>{"a"});
}

TEST_CASE("TextRank matches the closed-form PageRank") {
  // Content tokens form the path alpha - beta - gamma plus the edge beta - delta.
  const auto s = slice_of({{"u", {"alpha", "beta", "gamma"}}, {"u", {"delta", "beta"}}});
  TextRankParams params;
  params.tolerance = 1e-12;
  const auto scores = score_textrank(s, nullptr, params);
  REQUIRE(scores.size() == 4);
  // Nodes: alpha(0) beta(1) gamma(2) delta(3).
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  const int deg[4] = {1, 3, 1, 1};
  const std::pair<int, int> edges[] = {{0, 1}, {1, 2}, {1, 3}};
  for (auto [a, b] : edges) {
    M(b, a) = 1.0 / deg[a];
    M(a, b) = 1.0 / deg[b];
  }
  const double d = 0.85;
  const Eigen::Vector4d r =
      (Eigen::Matrix4d::Identity() - d * M).lu().solve(Eigen::Vector4d::Constant((1.0 - d) / 4.0));
  CHECK(scores.at("alpha") == doctest::Approx(r(0)).epsilon(1e-8));
  CHECK(scores.at("beta") == doctest::Approx(r(1)).epsilon(1e-8));
  CHECK(scores.at("delta") == doctest::Approx(r(3)).epsilon(1e-8));
}

TEST_CASE("TextRank uses tags when present") {
  auto s = slice_of({{"u", {"the", "red", "car", "runs"}}});
  PosSidecar pos{{"c0", {"DET", "ADJ", "NOUN", "VERB"}}};
  const auto scores = score_textrank(s, &pos);
  CHECK(scores.size() == 2);
  CHECK(scores.count("red") == 1);
  CHECK(scores.count("runs") == 0);
  CHECK(is_textrank_tag("NNS"));
  CHECK_FALSE(is_textrank_tag("VB"));
}

TEST_CASE("score files round-trip") {
  std::vector<ScoreRow> rows{{"b", "x", 0.25}, {"a", "y", -1.0 / 3.0}};
  std::stringstream ss;
  write_score_file(ss, "npmi", rows, "lexvar test");
  std::string metric;
  const auto back = read_score_file(ss, &metric);
  CHECK(metric == "npmi");
  REQUIRE(back.size() == 2);
  CHECK(back[0].community == "a");
  CHECK(back[0].value == -1.0 / 3.0);
}
