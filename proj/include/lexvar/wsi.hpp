#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lexvar/clustering.hpp"
#include "lexvar/ingest.hpp"
#include "lexvar/lexical.hpp"

namespace lexvar {

using SenseId = std::uint32_t;

/// One token occurrence, keyed by (token, community, comment_id, position).
struct Occurrence {
  std::string token;
  std::string community;
  std::string comment_id;
  std::uint32_t position = 0;
  std::string user;

  friend bool operator==(const Occurrence& a, const Occurrence& b) {
    return a.token == b.token && a.community == b.community && a.comment_id == b.comment_id &&
           a.position == b.position;
  }
};

/// Strict weak order on the occurrence key (user excluded).
bool occurrence_key_less(const Occurrence& a, const Occurrence& b);
std::string occurrence_key_string(const Occurrence& o);

/// Contextual vectors, one row of `dim` floats per occurrence.
struct EmbeddingShard {
  static constexpr std::uint32_t kDefaultDim = 3072;

  std::uint32_t dim = kDefaultDim;
  std::vector<Occurrence> occurrences;
  std::vector<float> values;

  std::size_t size() const { return occurrences.size(); }
  std::span<const float> vector(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  void add(Occurrence occurrence, std::span<const float> vec);
};

/// Substitute representatives: per occurrence `reps_per_occurrence`
/// multisets of `substitutes_per_rep` substitute ids into `vocabulary`.
struct RepresentativeShard {
  static constexpr std::uint32_t kReps = 15;
  static constexpr std::uint32_t kSubstitutes = 20;

  std::uint32_t reps_per_occurrence = kReps;
  std::uint32_t substitutes_per_rep = kSubstitutes;
  std::vector<Occurrence> occurrences;
  std::vector<std::string> vocabulary;
  std::vector<std::uint32_t> substitutes;

  std::size_t size() const { return occurrences.size(); }
  std::size_t stride() const {
    return static_cast<std::size_t>(reps_per_occurrence) * substitutes_per_rep;
  }
  std::span<const std::uint32_t> representative(std::size_t occ, std::size_t rep) const {
    return {substitutes.data() + occ * stride() + rep * substitutes_per_rep, substitutes_per_rep};
  }
  std::uint32_t intern(const std::string& substitute);
  /// reps[r][j] is substitute j of representative r.
  void add(Occurrence occurrence, const std::vector<std::vector<std::string>>& reps);

 private:
  std::unordered_map<std::string, std::uint32_t> lookup_;
};

enum class WsiMethod { kmeans, spectral, substitution };
const char* to_string(WsiMethod method);
WsiMethod parse_wsi_method(const std::string& name);

struct KMeansSenseParams {
  double gamma = 10000.0;
  std::size_t k_max = 10;
  std::size_t n_init = 10;
};

struct SpectralSenseParams {
  std::size_t neighbors = 7;
  std::size_t max_k = 10;
  std::size_t n_init = 10;
};

struct SubstitutionSenseParams {
  std::size_t max_clusters = 25;
  double min_cluster_fraction = 0.02;
  std::uint32_t reps_per_occurrence = RepresentativeShard::kReps;
};

using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

struct KMeansSenses {
  Eigen::MatrixXd centroids;  // n_senses x dim
};

struct SpectralSenses {
  Eigen::MatrixXf exemplars;  // one training vector per row
  std::vector<SenseId> labels;
};

/// tf-idf representative space of the substitution method. Training
/// representatives are deduplicated; `multiplicity` counts copies.
struct SubstitutionSenses {
  std::vector<std::string> vocabulary;
  std::vector<double> idf;
  std::vector<SparseVector> representatives;  // l2-normalised
  std::vector<SenseId> labels;
  std::vector<std::uint32_t> multiplicity;
  std::vector<std::uint64_t> cluster_sizes;  // representatives per sense

  /// Rebuilds the lookup tables below; called after training and loading.
  void build_index();
  std::unordered_map<std::string, std::uint32_t> vocab_index;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings;
};

/// Induced sense inventory of one word.
struct SenseModel {
  std::string token;
  WsiMethod method = WsiMethod::kmeans;
  std::uint32_t n_senses = 0;
  std::uint64_t seed = 0;
  // Training parameters, recorded for provenance.
  double gamma = 0.0;
  std::uint32_t k_max = 0;
  std::uint32_t neighbors = 0;
  std::uint32_t max_clusters = 0;
  /// Sense of each training occurrence, in training order.
  std::vector<SenseId> training_labels;
  std::variant<KMeansSenses, SpectralSenses, SubstitutionSenses> senses;
};

// ---------------------------------------------------------------------------
// Vocabulary and sampling

struct SenseVocabParams {
  double top_fraction = 0.1;
  std::uint64_t min_total_occurrences = 500;
  std::uint64_t min_breadth = 350;
};

/// Raw token occurrence counts over the corpus.
std::map<std::string, std::uint64_t> count_token_occurrences(std::span<const CorpusSlice> slices);

/// Non-emoji tokens within the top 10% of at least one community, with at
/// least 500 occurrences overall and present in at least min_breadth
/// communities. Sorted.
std::vector<std::string> select_sense_vocab(const FrequencyTable& table,
                                            const std::map<std::string, std::uint64_t>& occurrence_counts,
                                            SenseVocabParams params = {});

/// Uniform sample without replacement of min(n, |occurrences|) occurrences,
/// a pure function of the occurrence key set and the seed; returned in key
/// order. Throws when there is nothing to sample.
std::vector<Occurrence> sample_training_occurrences(const std::string& token, std::vector<Occurrence> occurrences,
                                                    std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// k selection

struct KSelection {
  std::size_t k = 1;
  std::vector<double> rss;   // rss[k-1]
  std::vector<double> cost;  // rss + gamma * k
  KMeansResult clustering;   // the chosen clustering
};

/// k = argmin_k RSS(k) + gamma * k over k = 1..min(k_max, #distinct points);
/// ties go to the smaller k.
KSelection choose_k_penalized(const Eigen::MatrixXd& points, double gamma, std::size_t k_max,
                              std::size_t n_init, std::uint64_t seed);

/// k = argmax_k (lambda_{k+1} - lambda_k) for k = 1..min(max_k, m-1), given
/// ascending eigenvalues; ties go to the smaller k.
std::size_t choose_k_eigengap(std::span<const double> eigenvalues, std::size_t max_k = 10);

/// Unit-weight symmetric K-nearest-neighbour graph (edge when either side
/// nominates the other), as adjacency lists.
std::vector<std::vector<std::size_t>> knn_graph(const Eigen::MatrixXd& points, std::size_t neighbors);

/// Ascending spectrum of the symmetric normalised Laplacian
/// I - D^{-1/2} W D^{-1/2} of an unweighted graph, with eigenvectors.
struct LaplacianSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd degrees;
};
LaplacianSpectrum normalized_laplacian_spectrum(const std::vector<std::vector<std::size_t>>& graph);

// ---------------------------------------------------------------------------
// Training and matching

SenseModel train_kmeans_senses(const std::string& token, const Eigen::MatrixXd& points,
                               KMeansSenseParams params, std::uint64_t seed);
SenseId match_embedding(const SenseModel& model, std::span<const float> vec);
SenseId match_embedding(const SenseModel& model, std::span<const double> vec);

SenseModel train_spectral_senses(const std::string& token, const Eigen::MatrixXd& points,
                                 SpectralSenseParams params, std::uint64_t seed);
SenseId match_spectral(const SenseModel& model, std::span<const float> vec);
SenseId match_spectral(const SenseModel& model, std::span<const double> vec);

/// Representatives of one occurrence as strings: reps[r][j].
using RepresentativeSet = std::vector<std::vector<std::string>>;

SenseModel train_substitution_senses(const std::string& token, const RepresentativeShard& shard,
                                     std::span<const std::size_t> occurrences, SubstitutionSenseParams params,
                                     std::uint64_t seed);
SenseModel train_substitution_senses(const std::string& token, const std::vector<RepresentativeSet>& reps,
                                     SubstitutionSenseParams params, std::uint64_t seed);
SenseId match_substitution(const SenseModel& model, const RepresentativeShard& shard, std::size_t occurrence);
SenseId match_substitution(const SenseModel& model, const RepresentativeSet& reps);

/// Copies the listed shard rows into a points matrix (double precision).
Eigen::MatrixXd gather_points(const EmbeddingShard& shard, std::span<const std::size_t> rows);

// ---------------------------------------------------------------------------
// Assignments

struct SenseAssignment {
  Occurrence occurrence;
  SenseId sense = 0;
};

/// TSV: token, community, comment_id, position, user, sense_id.
void write_assignments(std::ostream& out, const std::vector<SenseAssignment>& rows,
                       const std::string& header_comment = {});
std::vector<SenseAssignment> read_assignments(std::istream& in);

}  // namespace lexvar
