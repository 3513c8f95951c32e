#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lexvar/lexical.hpp"
#include "lexvar/wsi.hpp"

namespace lexvar {

/// A sense of one word: (token, sense id).
struct SenseKey {
  std::string token;
  SenseId sense = 0;

  friend auto operator<=>(const SenseKey&, const SenseKey&) = default;
};

/// Distinct-user counts per (community, sense), over the senses of all
/// modeled words.
class SenseFrequencyTable {
 public:
  /// Records that `user` expressed the sense in the community. Repeats are
  /// ignored.
  void add(const std::string& community, const SenseKey& key, const std::string& user);

  std::uint64_t count(const std::string& community, const SenseKey& key) const;
  std::uint64_t community_total(const std::string& community) const;
  std::uint64_t global_count(const SenseKey& key) const;
  std::uint64_t grand_total() const { return grand_total_; }

  std::vector<std::string> communities() const;
  /// User counts of the senses of `token` observed in the community.
  std::map<SenseId, std::uint64_t> senses_of(const std::string& community, const std::string& token) const;
  /// Tokens with at least one sense observed in the community, sorted.
  std::vector<std::string> tokens_in(const std::string& community) const;

 private:
  std::map<std::string, std::map<SenseKey, std::set<std::string>>> users_;
  std::map<std::string, std::uint64_t> totals_;
  std::map<SenseKey, std::uint64_t> global_;
  std::uint64_t grand_total_ = 0;
};

/// Builds the table from assignments; every occurrence must carry a user.
SenseFrequencyTable count_sense_users(std::span<const SenseAssignment> assignments);

/// NPMI of one sense in one community, with the same algebra as the type
/// metric. Throws UndefinedScore when the sense is absent from the community.
PmiScore sense_npmi(const SenseFrequencyTable& table, const std::string& community, const SenseKey& key);

struct SenseScore {
  std::string community;
  std::string token;
  std::string method;
  SenseId dominant_sense = 0;
  double value = 0.0;
};

/// NPMI of the word's dominant sense in the community. The dominant sense
/// has the most users in the community; ties go to the globally larger
/// sense, then the lower id. Throws UndefinedScore when the word has no
/// assigned occurrence in the community.
SenseScore word_sense_specificity(const SenseFrequencyTable& table, const std::string& community,
                                  const std::string& token, const std::string& method);

/// Scores every (community, token) pair present in the table, sorted.
std::vector<SenseScore> score_all_words(const SenseFrequencyTable& table, const std::string& method);

/// TSV: community, token, method, dominant_sense, value.
void write_sense_scores(std::ostream& out, const std::vector<SenseScore>& rows,
                        const std::string& header_comment = {});
std::vector<SenseScore> read_sense_scores(std::istream& in);

}  // namespace lexvar
