#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexvar/ingest.hpp"
#include "lexvar/util.hpp"

namespace lexvar {

/// Raised when a score is requested for a pair with no support.
class UndefinedScore : public Error {
 public:
  using Error::Error;
};

/// Per-(community, token) counts of distinct users, with the marginals every
/// type metric needs.
///
/// counts(s, t) = f_s(t), the number of distinct users of t in s. Totals are
/// maintained alongside so probabilities are O(log n) lookups.
class FrequencyTable {
 public:
  using Counts = std::map<std::string, std::uint64_t>;

  /// Adds one community's user counts. Throws on a duplicate community.
  void add_community(const std::string& community, const Counts& counts);

  std::uint64_t count(const std::string& community, const std::string& token) const;
  std::uint64_t community_total(const std::string& community) const;
  std::uint64_t global_count(const std::string& token) const;
  std::uint64_t grand_total() const { return grand_total_; }
  /// Number of communities in which the token appears.
  std::uint64_t doc_freq(const std::string& token) const;
  std::size_t n_communities() const { return counts_.size(); }

  bool has_community(const std::string& community) const { return counts_.count(community) > 0; }
  const Counts& community_counts(const std::string& community) const;
  std::vector<std::string> communities() const;
  const Counts& global_counts() const { return global_; }

 private:
  std::map<std::string, Counts> counts_;
  std::map<std::string, std::uint64_t> totals_;
  Counts global_;
  std::map<std::string, std::uint64_t> doc_freq_;
  std::uint64_t grand_total_ = 0;
};

/// Distinct-user counts for one community (a user contributes at most 1 per token).
FrequencyTable::Counts count_users(const CorpusSlice& slice);

FrequencyTable build_frequency_table(std::span<const CorpusSlice> slices);

/// Tokens ranked by count descending, cut to the top `fraction` of distinct
/// types (ceil, ties at the boundary included).
std::vector<std::string> top_fraction_tokens(const FrequencyTable::Counts& counts, double fraction);

struct TypeVocabParams {
  double top_fraction = 0.2;
  std::uint64_t min_count = 10;
};

/// Scored vocabulary of a community: the top 20% of types by user count,
/// without those used by fewer than 10 users. Sorted by token.
std::vector<std::string> select_type_vocab(const FrequencyTable& table, const std::string& community,
                                           TypeVocabParams params = {});

struct PmiScore {
  double pmi = 0.0;
  double npmi = 0.0;
};

/// PMI / NPMI from raw counts (natural log). Shared by the type and sense
/// metrics; throws UndefinedScore when count == 0.
PmiScore npmi_from_counts(std::uint64_t count, std::uint64_t context_total, std::uint64_t global_count,
                          std::uint64_t grand_total);

PmiScore score_pmi_npmi(const FrequencyTable& table, const std::string& community,
                        const std::string& token);

/// (1 + log10 f_s(t)) * log10(N / d(t)).
double score_tfidf(const FrequencyTable& table, const std::string& community, const std::string& token);

/// Signed Jensen-Shannon divergence contribution of the token (base 2),
/// negative when the token is more probable in the background (all other
/// communities pooled).
double score_jsd(const FrequencyTable& table, const std::string& community, const std::string& token);

/// Coarse part-of-speech tags per comment id, aligned with Comment::tokens.
using PosSidecar = std::unordered_map<std::string, std::vector<std::string>>;

struct TextRankParams {
  double damping = 0.85;
  double tolerance = 1e-4;
  std::size_t max_iterations = 1000;
  std::size_t window = 2;
};

/// Keeps NOUN/PROPN/ADJ (universal) and NN*/JJ* (Penn) tags.
bool is_textrank_tag(const std::string& tag);
/// Fallback filter when no tags exist: drops sentinels, punctuation, stopwords.
bool is_textrank_content_token(const std::string& token);

/// PageRank over the undirected co-occurrence graph of the community's
/// candidate tokens. Returns an empty map for an empty graph.
std::map<std::string, double> score_textrank(const CorpusSlice& slice, const PosSidecar* pos = nullptr,
                                             TextRankParams params = {});

/// One row of a metric file.
struct ScoreRow {
  std::string community;
  std::string token;
  double value = 0.0;
};

/// Writes "community\ttoken\tmetric\tvalue" rows, sorted by (community, token).
void write_score_file(std::ostream& out, const std::string& metric, std::vector<ScoreRow> rows,
                      const std::string& header_comment = {});
std::vector<ScoreRow> read_score_file(std::istream& in, std::string* metric = nullptr);

PosSidecar read_pos_sidecar(std::istream& in);

}  // namespace lexvar
