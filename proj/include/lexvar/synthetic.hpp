#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexvar/ingest.hpp"
#include "lexvar/wsi.hpp"

// Synthetic corpora and representations with planted structure, used by the
// tests, the acceptance suite and the `synth` CLI commands.
namespace lexvar::synthetic {

struct CorpusSpec {
  std::size_t communities = 3;
  std::size_t comments_per_community = 1000;
  std::size_t users_per_community = 80;
  std::size_t shared_users = 20;     // users posting in every community
  std::size_t background_words = 300;
  std::size_t jargon_per_community = 5;
  double jargon_rate = 0.35;         // chance a comment carries jargon
  /// Words used at the same rate everywhere but with a community-specific
  /// planted sense.
  std::vector<std::string> sense_words = {"python"};
  double sense_word_rate = 0.3;
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 20;
  double top_level_rate = 0.4;
};

struct Corpus {
  std::vector<std::string> communities;
  /// Raw records (line-delimited JSON) as a dump would hold them.
  std::vector<std::string> raw_lines;
  std::map<std::string, std::vector<std::string>> jargon;  // community -> words
  std::vector<std::string> background;
  std::vector<std::string> sense_words;
};

Corpus generate_corpus(const CorpusSpec& spec, std::uint64_t seed);

/// Everything but the raw lines, as JSON; enough to re-plant senses later.
void write_corpus_meta(std::ostream& out, const Corpus& corpus);
Corpus read_corpus_meta(std::istream& in);

/// Glossary TSV: each community's jargon, plus one multi-word entry per
/// community (dropped at load).
void write_glossary(std::ostream& out, const Corpus& corpus);
/// Glossaries of the communities assigned to one another by a cyclic shift.
void write_shuffled_glossary(std::ostream& out, const Corpus& corpus);
/// community -> topic TSV ("topic0", "topic1", ...).
void write_topics(std::ostream& out, const Corpus& corpus);

/// Planted sense of an occurrence: for a sense word, the index of the
/// community; 0 otherwise.
SenseId planted_sense(const Corpus& corpus, const std::string& community, const std::string& token);

struct EmbeddingSpec {
  std::uint32_t dim = 32;
  double center_scale = 3.0;  // per-coordinate sd of sense centres
  double noise = 1.0;         // per-coordinate sd around the centre
};

/// Vectors for every occurrence of a vocabulary word in `comments`, centred
/// on a per-(word, planted sense) point.
EmbeddingShard embed_occurrences(const Corpus& corpus, const std::vector<Comment>& comments,
                                 const std::set<std::string>& vocab, const EmbeddingSpec& spec, std::uint64_t seed);

/// Representatives for the same occurrences: substitutes drawn from a
/// per-(word, planted sense) pool of 30 words.
RepresentativeShard represent_occurrences(const Corpus& corpus, const std::vector<Comment>& comments,
                                          const std::set<std::string>& vocab, std::uint64_t seed);

struct Blobs {
  Eigen::MatrixXd points;
  std::vector<std::size_t> labels;
};

/// n points in `dim` dimensions around k centres. Points have isotropic
/// Gaussian noise with per-coordinate sd `sigma`; centres sit on a simplex
/// with pairwise distance `separation * sigma * sqrt(dim)`, i.e. measured in
/// units of the blob's root-mean-square radius. Labels are balanced.
Blobs planted_blobs(std::size_t n, std::size_t dim, std::size_t k, double separation, double sigma,
                    std::uint64_t seed);

}  // namespace lexvar::synthetic
