#include "lexvar/ingest.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "json.hpp"
#include "lexvar/text.hpp"
#include "lexvar/util.hpp"

namespace lexvar {
namespace {

using nlohmann::json;

bool is_deleted_marker(const std::string& s) { return s == "[deleted]" || s == "[removed]"; }

std::string required_string(const json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw Error(std::string("missing or non-string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::int64_t timestamp_field(const json& record) {
  auto it = record.find("created_utc");
  if (it == record.end() || it->is_null()) return 0;
  if (it->is_number_integer()) return it->get<std::int64_t>();
  if (it->is_number()) return static_cast<std::int64_t>(it->get<double>());
  if (it->is_string()) return std::stoll(it->get<std::string>());
  throw Error("bad created_utc field");
}

}  // namespace

bool is_top_level_parent(const std::optional<std::string>& parent_id, const std::string& link_id) {
  if (!parent_id) return true;
  if (parent_id->rfind("t3_", 0) == 0) return true;
  if (parent_id->rfind("t1_", 0) == 0) return false;
  return !link_id.empty() && *parent_id == link_id;
}

std::optional<std::string> parent_comment_id(const std::optional<std::string>& parent_id) {
  if (!parent_id || parent_id->rfind("t3_", 0) == 0) return std::nullopt;
  if (parent_id->rfind("t1_", 0) == 0) return parent_id->substr(3);
  return *parent_id;
}

CommentStreamParser::CommentStreamParser(std::istream& in, ParseOptions options)
    : in_(in), options_(options) {}

std::optional<Comment> CommentStreamParser::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (trim(line).empty()) continue;
    Comment comment;
    std::string body;
    try {
      const json record = json::parse(line);
      if (!record.is_object()) throw Error("record is not an object");
      body = required_string(record, "body");
      comment.author = required_string(record, "author");
      comment.community = required_string(record, "subreddit");
      comment.id = required_string(record, "id");
      auto parent = record.find("parent_id");
      if (parent == record.end()) throw Error("missing field 'parent_id'");
      if (parent->is_string()) comment.parent_id = parent->get<std::string>();
      auto link = record.find("link_id");
      if (link != record.end() && link->is_string()) comment.link_id = link->get<std::string>();
      comment.created_at = timestamp_field(record);
    } catch (const std::exception& e) {
      if (options_.strict) {
        throw Error("malformed record at line " + std::to_string(line_no_) + ": " + e.what());
      }
      ++errors_;
      continue;
    }
    if (trim(body).empty() || is_deleted_marker(body) || is_deleted_marker(comment.author)) {
      ++skipped_;
      continue;
    }
    comment.is_top_level = is_top_level_parent(comment.parent_id, comment.link_id);
    if (options_.tokenize) comment.tokens = normalize_and_tokenize(body);
    ++parsed_;
    return comment;
  }
  return std::nullopt;
}

ParseResult parse_comment_stream(std::istream& in, ParseOptions options) {
  CommentStreamParser parser(in, options);
  ParseResult result;
  while (auto comment = parser.next()) result.comments.push_back(std::move(*comment));
  result.skipped_deleted = parser.skipped_deleted();
  result.errors = parser.errors();
  return result;
}

CorpusSlice sample_community(std::string community, std::vector<Comment> comments, std::size_t n,
                             std::uint64_t seed) {
  if (n == 0) throw Error("sample_community: sample size must be positive");
  if (comments.size() > n) {
    // Ranking by a keyed hash of the id is a uniform sample without
    // replacement that ignores input order.
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(comments.size());
    for (std::size_t i = 0; i < comments.size(); ++i) {
      keyed.emplace_back(splitmix64(seed ^ fnv1a64(comments[i].id)), i);
    }
    std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(n), keyed.end(),
                     [&](const auto& a, const auto& b) {
                       if (a.first != b.first) return a.first < b.first;
                       return comments[a.second].id < comments[b.second].id;
                     });
    std::vector<Comment> kept;
    kept.reserve(n);
    for (std::size_t i = 0; i < n; ++i) kept.push_back(std::move(comments[keyed[i].second]));
    comments = std::move(kept);
  }
  std::stable_sort(comments.begin(), comments.end(),
                   [](const Comment& a, const Comment& b) { return a.id < b.id; });
  CorpusSlice slice;
  slice.community = std::move(community);
  slice.comments = std::move(comments);
  slice.sample_seed = seed;
  slice.sample_size = n;
  return slice;
}

std::string context_window(const TokenOccurrence& occurrence, std::size_t window) {
  const auto& tokens = occurrence.comment->tokens;
  const std::size_t pos = occurrence.position;
  const std::size_t left = pos >= window ? pos - window : 0;
  const std::size_t right = std::min(tokens.size(), pos + 1 + window);
  std::string key;
  for (std::size_t i = left; i < pos; ++i) {
    key += tokens[i];
    key += ' ';
  }
  key += '\x1f';
  for (std::size_t i = pos + 1; i < right; ++i) {
    key += ' ';
    key += tokens[i];
  }
  return key;
}

std::vector<TokenOccurrence> filter_bot_contexts(std::span<const TokenOccurrence> occurrences,
                                                 BotFilterParams params) {
  std::vector<std::string> keys;
  keys.reserve(occurrences.size());
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& occ : occurrences) {
    keys.push_back(context_window(occ, params.window));
    ++counts[keys.back()];
  }
  std::vector<TokenOccurrence> kept;
  kept.reserve(occurrences.size());
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    if (counts[keys[i]] < params.min_repeats) kept.push_back(occurrences[i]);
  }
  return kept;
}

void write_comment(std::ostream& out, const Comment& comment) {
  json record;
  record["id"] = comment.id;
  record["community"] = comment.community;
  record["author"] = comment.author;
  record["parent_id"] = comment.parent_id ? json(*comment.parent_id) : json(nullptr);
  record["link_id"] = comment.link_id;
  record["top_level"] = comment.is_top_level;
  record["created_utc"] = comment.created_at;
  record["tokens"] = comment.tokens;
  out << record.dump() << '\n';
}

std::vector<Comment> read_canonical_corpus(std::istream& in) {
  std::vector<Comment> comments;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    try {
      const json record = json::parse(line);
      Comment c;
      c.id = record.at("id").get<std::string>();
      c.community = record.at("community").get<std::string>();
      c.author = record.at("author").get<std::string>();
      const auto& parent = record.at("parent_id");
      if (!parent.is_null()) c.parent_id = parent.get<std::string>();
      c.link_id = record.value("link_id", std::string());
      c.is_top_level = record.at("top_level").get<bool>();
      c.created_at = record.value("created_utc", std::int64_t{0});
      c.tokens = record.at("tokens").get<std::vector<std::string>>();
      comments.push_back(std::move(c));
    } catch (const std::exception& e) {
      throw Error("canonical corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return comments;
}

std::vector<CorpusSlice> group_by_community(std::vector<Comment> comments) {
  std::map<std::string, std::vector<Comment>> groups;
  for (auto& c : comments) groups[c.community].push_back(std::move(c));
  std::vector<CorpusSlice> slices;
  slices.reserve(groups.size());
  for (auto& [name, list] : groups) {
    CorpusSlice slice;
    slice.community = name;
    slice.sample_size = list.size();
    slice.comments = std::move(list);
    slices.push_back(std::move(slice));
  }
  return slices;
}

}  // namespace lexvar
