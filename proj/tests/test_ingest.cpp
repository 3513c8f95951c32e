#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "lexvar/ingest.hpp"
#include "lexvar/util.hpp"

using namespace lexvar;

namespace {

std::string record(const std::string& id, const std::string& sub, const std::string& author, const std::string& body,
                   const std::string& parent = "t3_p", const std::string& link = "t3_p") {
  return R"({"id":")" + id + R"(","subreddit":")" + sub + R"(","author":")" + author + R"(","body":")" + body +
         R"(","parent_id":")" + parent + R"(","link_id":")" + link + R"(","created_utc":1500000000})";
}

Comment make_comment(const std::string& id, std::vector<std::string> tokens, const std::string& author = "u") {
  Comment c;
  c.id = id;
  c.community = "s";
  c.author = author;
  c.tokens = std::move(tokens);
  return c;
}

}  // namespace

TEST_CASE("parser counts deleted and malformed records") {
  std::stringstream in;
  in << record("a", "s1", "x", "Hello World") << '\n'
     << record("b", "s1", "[deleted]", "gone") << '\n'
     << record("c", "s1", "y", "[removed]") << '\n'
     << "{not json\n"
     << R"({"id":"d","subreddit":"s1","body":"no author","parent_id":"t3_p"})" << '\n'
     << '\n'
     << record("e", "s2", "z", "reply here", "t1_a") << '\n';
  const auto result = parse_comment_stream(in);
  REQUIRE(result.comments.size() == 2);
  CHECK(result.skipped_deleted == 2);
  CHECK(result.errors == 2);
  CHECK(result.comments[0].tokens == std::vector<std::string>{"hello", "world"});
  CHECK(result.comments[0].is_top_level);
  CHECK_FALSE(result.comments[1].is_top_level);
  CHECK(result.comments[0].created_at == 1500000000);
}

TEST_CASE("strict mode names the line") {
  std::stringstream in;
  in << record("a", "s", "x", "fine") << "\n{broken\n";
  ParseOptions options;
  options.strict = true;
  CommentStreamParser parser(in, options);
  CHECK(parser.next().has_value());
  try {
    parser.next();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("top-level detection") {
  CHECK(is_top_level_parent(std::string("t3_x"), "t3_x"));
  CHECK_FALSE(is_top_level_parent(std::string("t1_x"), "t3_x"));
  CHECK(is_top_level_parent(std::string("abc"), "abc"));
  CHECK_FALSE(is_top_level_parent(std::string("abc"), "def"));
  CHECK(is_top_level_parent(std::nullopt, ""));
  CHECK(parent_comment_id(std::string("t1_abc")) == std::optional<std::string>("abc"));
  CHECK_FALSE(parent_comment_id(std::string("t3_abc")).has_value());
}

TEST_CASE("sampling ignores input order and respects the size") {
  std::vector<Comment> comments;
  for (int i = 0; i < 200; ++i) comments.push_back(make_comment("c" + std::to_string(i), {"w"}));
  auto reversed = comments;
  std::reverse(reversed.begin(), reversed.end());
  const auto a = sample_community("s", comments, 50, 9);
  const auto b = sample_community("s", reversed, 50, 9);
  const auto c = sample_community("s", comments, 50, 10);
  REQUIRE(a.comments.size() == 50);
  std::vector<std::string> ia, ib, ic;
  for (const auto& x : a.comments) ia.push_back(x.id);
  for (const auto& x : b.comments) ib.push_back(x.id);
  for (const auto& x : c.comments) ic.push_back(x.id);
  CHECK(ia == ib);
  CHECK(ia != ic);
  CHECK(std::is_sorted(ia.begin(), ia.end()));
  CHECK(sample_community("s", comments, 500, 1).comments.size() == 200);
}

TEST_CASE("bot filter drops repeated context windows") {
  std::vector<Comment> comments;
  for (int i = 0; i < 12; ++i) {
    comments.push_back(make_comment("b" + std::to_string(i), {"i", "am", "a", "bot", "beep", "boop"}));
  }
  comments.push_back(make_comment("h", {"my", "bot", "broke"}));
  std::vector<TokenOccurrence> occ;
  for (const auto& c : comments) {
    for (std::size_t p = 0; p < c.tokens.size(); ++p) {
      if (c.tokens[p] == "bot") occ.push_back({&c, p});
    }
  }
  const auto kept = filter_bot_contexts(occ, {5, 10});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].comment->id == "h");
  CHECK(filter_bot_contexts(occ, {5, 13}).size() == 13);
}

TEST_CASE("context windows are clipped") {
  const auto c = make_comment("x", {"a", "b", "c", "d"});
  CHECK(context_window({&c, 0}, 1) != context_window({&c, 1}, 1));
  const auto d = make_comment("y", {"z", "b", "c", "d"});
  CHECK(context_window({&c, 2}, 1) == context_window({&d, 2}, 1));
}

TEST_CASE("canonical corpus round-trips") {
  Comment c = make_comment("id1", {"a", "<num>", "ü"});
  c.parent_id = "t1_zz";
  c.link_id = "t3_q";
  c.created_at = 42;
  Comment top = make_comment("id2", {});
  top.is_top_level = true;
  std::stringstream ss;
  ss << "# header\n";
  write_comment(ss, c);
  write_comment(ss, top);
  const auto back = read_canonical_corpus(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "id1");
  CHECK(back[0].tokens == c.tokens);
  CHECK(back[0].parent_id == c.parent_id);
  CHECK(back[0].created_at == 42);
  CHECK(back[1].is_top_level);
  CHECK_FALSE(back[1].parent_id.has_value());
}

TEST_CASE("grouping orders communities") {
  std::vector<Comment> cs;
  for (const char* s : {"b", "a", "b"}) {
    Comment c;
    c.id = std::string(s) + std::to_string(cs.size());
    c.community = s;
    cs.push_back(c);
  }
  const auto slices = group_by_community(cs);
  REQUIRE(slices.size() == 2);
  CHECK(slices[0].community == "a");
  CHECK(slices[1].comments.size() == 2);
}
