#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexvar/lexical.hpp"

namespace lexvar {

/// Single-token glossary of one community.
struct Glossary {
  std::string community;
  std::set<std::string> terms;
  std::map<std::string, std::string> definitions;
  /// Terms never seen in the community's corpus (exact string match).
  std::set<std::string> absent_from_corpus;
};

struct GlossaryLoadStats {
  std::size_t entries = 0;
  std::size_t dropped_multiword = 0;
  std::size_t duplicates = 0;
};

/// Reads TSV rows "community\tterm[\tdefinition]". Each term goes through the
/// canonical tokenizer; entries that do not come out as exactly one token are
/// dropped and counted.
std::map<std::string, Glossary> load_glossaries(std::istream& in, GlossaryLoadStats* stats = nullptr);

/// Fills Glossary::absent_from_corpus from the frequency table.
void flag_absent_terms(std::map<std::string, Glossary>& glossaries, const FrequencyTable& table);

/// Scores of one metric: community -> token -> value.
using ScoreMap = std::map<std::string, std::map<std::string, double>>;
ScoreMap to_score_map(const std::vector<ScoreRow>& rows);

/// Dense rank (1 = highest score, ties share the rank) of the best-ranked
/// glossary term of the community; 0 when no glossary term is scored.
std::size_t best_glossary_rank(const std::map<std::string, double>& scores, const Glossary& glossary);

/// Mean over glossaried communities of 1 / best rank; a community with no
/// scored glossary term contributes 0.
double glossary_mrr(const ScoreMap& scores, const std::map<std::string, Glossary>& glossaries);

struct GlossaryCoverage {
  double median_glossary = 0.0;
  double median_non_glossary = 0.0;
  double pct_above_cutoff = 0.0;  // of scored glossary words, strictly above
  std::size_t n_glossary = 0;
  std::size_t n_non_glossary = 0;
};

/// Statistics over the scored words of glossaried communities.
GlossaryCoverage glossary_coverage(const ScoreMap& scores, const std::map<std::string, Glossary>& glossaries,
                                   double cutoff);

double median(std::vector<double> values);

struct Suggestion {
  std::string community;
  std::string token;
  double value = 0.0;
};

/// Highest-scoring non-glossary words per glossaried community.
std::vector<Suggestion> glossary_suggestions(const ScoreMap& scores, const std::map<std::string, Glossary>& glossaries,
                                             std::size_t per_community);

}  // namespace lexvar
