#include "lexvar/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <array>

namespace lexvar {
namespace {

using CodePoints = std::vector<UChar32>;

CodePoints decode(std::string_view text) {
  CodePoints out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c >= 0) out.push_back(c);
  }
  return out;
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[4];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, 4, c, error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

std::string encode(const UChar32* begin, const UChar32* end) {
  std::string out;
  for (const UChar32* p = begin; p != end; ++p) append_utf8(out, *p);
  return out;
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

bool is_punct(UChar32 c) {
  switch (u_charType(c)) {
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_CONNECTOR_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
      return true;
    default:
      return false;
  }
}

// Code points that stay glued to a preceding symbol: combining marks,
// variation selectors, zero-width joiners and emoji skin-tone modifiers.
bool is_symbol_extender(UChar32 c) {
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_ENCLOSING_MARK || c == 0x200D ||
         u_hasBinaryProperty(c, UCHAR_EMOJI_MODIFIER);
}

bool is_dropped(UChar32 c) {
  const auto type = u_charType(c);
  return (type == U_CONTROL_CHAR && !is_space(c)) || c == 0xFFFD;
}

bool ascii_digit(UChar32 c) { return c >= '0' && c <= '9'; }
bool name_char(UChar32 c) {
  return (c >= 'a' && c <= 'z') || ascii_digit(c) || c == '_' || c == '-';
}

bool starts_with_ci(const CodePoints& cps, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > cps.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (u_tolower(cps[pos + k]) != static_cast<UChar32>(prefix[k])) return false;
  }
  return true;
}

bool starts_with(const UChar32* p, const UChar32* end, std::string_view prefix) {
  if (static_cast<std::size_t>(end - p) < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (p[k] != static_cast<UChar32>(prefix[k])) return false;
  }
  return true;
}

CodePoints remove_urls(const CodePoints& cps) {
  static constexpr std::array<std::string_view, 3> kPrefixes{"http://", "https://", "www."};
  CodePoints out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    const bool at_word_start = i == 0 || !u_isalnum(cps[i - 1]);
    bool url = false;
    if (at_word_start) {
      for (auto prefix : kPrefixes) {
        if (starts_with_ci(cps, i, prefix)) {
          url = true;
          break;
        }
      }
    }
    if (url) {
      while (i < cps.size() && !is_space(cps[i])) ++i;
      continue;
    }
    out.push_back(cps[i++]);
  }
  return out;
}

// Length of a u/name or r/name mention (with optional leading slash), or 0.
std::size_t match_mention(const UChar32* p, const UChar32* end, UChar32 kind) {
  const UChar32* q = p;
  if (q < end && *q == '/') ++q;
  if (end - q < 3 || q[0] != kind || q[1] != '/') return 0;
  q += 2;
  const UChar32* name = q;
  while (q < end && name_char(*q)) ++q;
  if (q == name) return 0;
  return static_cast<std::size_t>(q - p);
}

// Length of a numeric span ("3,500", "-2.5") ending at a chunk edge or a
// punctuation character, or 0.
std::size_t match_number(const UChar32* p, const UChar32* end, bool allow_sign) {
  const UChar32* q = p;
  if (allow_sign && q < end && (*q == '+' || *q == '-')) ++q;
  if (q == end || !ascii_digit(*q)) return 0;
  while (q < end && ascii_digit(*q)) ++q;
  while (q + 1 < end && (*q == '.' || *q == ',') && ascii_digit(q[1])) {
    ++q;
    while (q < end && ascii_digit(*q)) ++q;
  }
  if (q != end && !is_punct(*q)) return 0;
  return static_cast<std::size_t>(q - p);
}

void tokenize_chunk(const UChar32* begin, const UChar32* end, std::vector<std::string>& out) {
  const UChar32* p = begin;
  bool boundary = true;
  while (p < end) {
    if (boundary) {
      bool matched = false;
      for (auto sentinel : {kNumToken, kUserToken, kSubredditToken}) {
        if (starts_with(p, end, sentinel)) {
          out.emplace_back(sentinel);
          p += sentinel.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (auto n = match_mention(p, end, 'u'); n > 0) {
        out.emplace_back(kUserToken);
        p += n;
        continue;
      }
      if (auto n = match_mention(p, end, 'r'); n > 0) {
        out.emplace_back(kSubredditToken);
        p += n;
        continue;
      }
      if (auto n = match_number(p, end, p == begin); n > 0) {
        out.emplace_back(kNumToken);
        p += n;
        continue;
      }
    }
    if (is_punct(*p)) {
      const UChar32* q = p + 1;
      while (q < end && is_symbol_extender(*q)) {
        ++q;
        // A joiner binds the next pictograph into the same token.
        if (q[-1] == 0x200D && q < end && is_punct(*q)) ++q;
      }
      out.push_back(encode(p, q));
      p = q;
      boundary = true;
      continue;
    }
    const UChar32* q = p;
    bool all_digits = true;
    while (q < end && !is_punct(*q)) {
      all_digits = all_digits && ascii_digit(*q);
      ++q;
    }
    if (all_digits) {
      out.emplace_back(kNumToken);
    } else {
      out.push_back(encode(p, q));
    }
    p = q;
    boundary = false;
  }
}

}  // namespace

std::vector<std::string> normalize_and_tokenize(std::string_view body) {
  CodePoints cps = remove_urls(decode(body));
  CodePoints cleaned;
  cleaned.reserve(cps.size());
  for (UChar32 c : cps) {
    if (!is_dropped(c)) cleaned.push_back(u_tolower(c));
  }

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_space(cleaned[i])) ++i;
    std::size_t j = i;
    while (j < cleaned.size() && !is_space(cleaned[j])) ++j;
    if (j > i) tokenize_chunk(cleaned.data() + i, cleaned.data() + j, tokens);
    i = j;
  }
  return tokens;
}

std::string unicode_lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (UChar32 c : decode(text)) append_utf8(out, u_tolower(c));
  return out;
}

bool is_sentinel_token(std::string_view token) {
  return token == kNumToken || token == kUserToken || token == kSubredditToken;
}

bool is_punctuation_token(std::string_view token) {
  if (token.empty() || is_sentinel_token(token)) return false;
  const CodePoints cps = decode(token);
  return !cps.empty() && is_punct(cps.front());
}

bool is_emoji_token(std::string_view token) {
  for (UChar32 c : decode(token)) {
    if (c < 0x80) continue;
    if (u_hasBinaryProperty(c, UCHAR_EXTENDED_PICTOGRAPHIC) ||
        u_hasBinaryProperty(c, UCHAR_EMOJI_PRESENTATION) ||
        u_hasBinaryProperty(c, UCHAR_REGIONAL_INDICATOR)) {
      return true;
    }
  }
  return false;
}

}  // namespace lexvar
