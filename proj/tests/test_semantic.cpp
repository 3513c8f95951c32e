#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lexvar/semantic.hpp"

using namespace lexvar;

namespace {

SenseAssignment row(const std::string& community, const std::string& user, SenseId sense, std::uint32_t pos = 0) {
  return {{"w", community, "c_" + community + user + std::to_string(pos), pos, user}, sense};
}

}  // namespace

TEST_CASE("sense users are deduplicated") {
  const std::vector<SenseAssignment> rows{row("A", "u1", 0), row("A", "u1", 0, 1), row("A", "u2", 0),
                                          row("A", "u3", 1), row("B", "u1", 1),    row("B", "u4", 1),
                                          row("B", "u5", 1)};
  const auto t = count_sense_users(rows);
  CHECK(t.count("A", {"w", 0}) == 2);
  CHECK(t.community_total("A") == 3);
  CHECK(t.global_count({"w", 1}) == 4);
  CHECK(t.grand_total() == 6);
  CHECK(t.senses_of("A", "w").size() == 2);
  CHECK(t.tokens_in("B") == std::vector<std::string>{"w"});

  // A: dominant sense 0; P(s|A) = 2/3, P(s) = 2/6, P(A, s) = 2/6.
  const auto a = word_sense_specificity(t, "A", "w", "kmeans");
  CHECK(a.dominant_sense == 0);
  CHECK(a.value == doctest::Approx(std::log(2.0) / std::log(3.0)));
  // B: sense 1 with P(s|B) = 1, P(s) = 4/6, P(B, s) = 3/6.
  const auto b = word_sense_specificity(t, "B", "w", "kmeans");
  CHECK(b.dominant_sense == 1);
  CHECK(b.value == doctest::Approx(std::log(1.5) / std::log(2.0)));
  CHECK_THROWS_AS(word_sense_specificity(t, "C", "w", "kmeans"), UndefinedScore);
}

TEST_CASE("dominant-sense ties go to the globally larger sense, then the lower id") {
  std::vector<SenseAssignment> rows{row("A", "a", 0), row("A", "b", 1), row("B", "c", 1)};
  CHECK(word_sense_specificity(count_sense_users(rows), "A", "w", "m").dominant_sense == 1);
  rows.push_back(row("B", "d", 0));
  CHECK(word_sense_specificity(count_sense_users(rows), "A", "w", "m").dominant_sense == 0);
}

TEST_CASE("missing users are rejected") {
  const std::vector<SenseAssignment> rows{row("A", "", 0)};
  CHECK_THROWS_AS(count_sense_users(rows), Error);
}

TEST_CASE("sense score files round-trip") {
  const std::vector<SenseAssignment> rows{row("A", "u1", 0), row("B", "u2", 1)};
  const auto scores = score_all_words(count_sense_users(rows), "spectral");
  REQUIRE(scores.size() == 2);
  std::stringstream ss;
  write_sense_scores(ss, scores, "lexvar test");
  const auto back = read_sense_scores(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].community == "B");
  CHECK(back[1].method == "spectral");
  CHECK(back[1].dominant_sense == 1);
  CHECK(back[1].value == scores[1].value);
}
