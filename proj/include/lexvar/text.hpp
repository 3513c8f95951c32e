#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lexvar {

inline constexpr std::string_view kNumToken = "<num>";
inline constexpr std::string_view kUserToken = "<user>";
inline constexpr std::string_view kSubredditToken = "<subreddit>";

/// Canonical tokenizer.
///
/// Steps, in order: URLs (maximal non-space spans starting with http://,
/// https:// or www.) are deleted; text is lowercased; split on whitespace;
/// u/name and r/name mentions (optionally with a leading slash) become
/// <user> / <subreddit>; numbers such as "3,500" or "-1.5" become <num>;
/// every punctuation or symbol character (Unicode P* and S*) is its own token.
/// Alphanumeric words like "ps5" are left intact.
std::vector<std::string> normalize_and_tokenize(std::string_view body);

/// Lowercases with the same per-code-point mapping the tokenizer uses.
std::string unicode_lowercase(std::string_view text);

bool is_sentinel_token(std::string_view token);
/// True for single punctuation/symbol tokens (emoji included).
bool is_punctuation_token(std::string_view token);
/// True when any code point of the token is pictographic or a regional indicator.
bool is_emoji_token(std::string_view token);

}  // namespace lexvar
