#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lexvar {

/// One normalized comment. `tokens` is the canonical token stream.
struct Comment {
  std::string id;
  std::string community;
  std::string author;
  std::optional<std::string> parent_id;
  std::string link_id;
  bool is_top_level = false;
  std::int64_t created_at = 0;
  std::vector<std::string> tokens;
};

struct CorpusSlice {
  std::string community;
  std::vector<Comment> comments;
  std::uint64_t sample_seed = 0;
  std::size_t sample_size = 0;
};

struct ParseOptions {
  /// Abort on the first malformed line instead of counting it.
  bool strict = false;
  /// Leave `tokens` empty (metadata-only pass over the unsampled dump).
  bool tokenize = true;
};

/// Streaming reader for line-delimited comment records (one JSON object per
/// line with body, author, subreddit, id, parent_id and optionally link_id,
/// created_utc).
class CommentStreamParser {
 public:
  explicit CommentStreamParser(std::istream& in, ParseOptions options = {});

  /// Next parseable comment, or nullopt at end of stream. Throws lexvar::Error
  /// naming the line number in strict mode.
  std::optional<Comment> next();

  std::size_t lines_read() const { return line_no_; }
  std::size_t parsed() const { return parsed_; }
  /// Records whose body (or author) is "[deleted]"/"[removed]" or empty.
  std::size_t skipped_deleted() const { return skipped_; }
  std::size_t errors() const { return errors_; }

 private:
  std::istream& in_;
  ParseOptions options_;
  std::size_t line_no_ = 0;
  std::size_t parsed_ = 0;
  std::size_t skipped_ = 0;
  std::size_t errors_ = 0;
};

struct ParseResult {
  std::vector<Comment> comments;
  std::size_t skipped_deleted = 0;
  std::size_t errors = 0;
};

ParseResult parse_comment_stream(std::istream& in, ParseOptions options = {});

/// Parent prefix "t3_" marks a reply to a post, "t1_" a reply to a comment;
/// otherwise the comment is top-level iff parent_id == link_id.
bool is_top_level_parent(const std::optional<std::string>& parent_id, const std::string& link_id);

/// Comment id referenced by a parent id ("t1_abc" -> "abc"); nullopt when the
/// parent is a post.
std::optional<std::string> parent_comment_id(const std::optional<std::string>& parent_id);

/// Uniform sample without replacement of min(n, |comments|) comments. The
/// result depends only on the multiset of comment ids and the seed; it is
/// returned sorted by comment id.
CorpusSlice sample_community(std::string community, std::vector<Comment> comments, std::size_t n,
                             std::uint64_t seed);

/// One occurrence of a token: a comment and a token index inside it.
struct TokenOccurrence {
  const Comment* comment = nullptr;
  std::size_t position = 0;
};

struct BotFilterParams {
  std::size_t window = 5;
  std::size_t min_repeats = 10;
};

/// Context window string (left tokens | right tokens, clipped to the comment).
std::string context_window(const TokenOccurrence& occurrence, std::size_t window);

/// Drops every occurrence whose context window is shared by min_repeats or
/// more occurrences in the input. Survivors keep their input order.
std::vector<TokenOccurrence> filter_bot_contexts(std::span<const TokenOccurrence> occurrences,
                                                 BotFilterParams params = {});

// Canonical tokenized corpus: one JSON object per line,
// {"id","community","author","parent_id","link_id","top_level","created_utc","tokens"}.
void write_comment(std::ostream& out, const Comment& comment);
std::vector<Comment> read_canonical_corpus(std::istream& in);

/// Groups comments by community, ordered by community name.
std::vector<CorpusSlice> group_by_community(std::vector<Comment> comments);

}  // namespace lexvar
