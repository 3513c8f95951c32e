#include "lexvar/wsi.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "lexvar/text.hpp"
#include "lexvar/util.hpp"

namespace lexvar {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool occurrence_key_less(const Occurrence& a, const Occurrence& b) {
  if (a.token != b.token) return a.token < b.token;
  if (a.community != b.community) return a.community < b.community;
  if (a.comment_id != b.comment_id) return a.comment_id < b.comment_id;
  return a.position < b.position;
}

std::string occurrence_key_string(const Occurrence& o) {
  std::string key = o.token;
  key += '\t';
  key += o.community;
  key += '\t';
  key += o.comment_id;
  key += '\t';
  key += std::to_string(o.position);
  return key;
}

void EmbeddingShard::add(Occurrence occurrence, std::span<const float> vec) {
  if (vec.size() != dim) throw Error("embedding dimension mismatch");
  for (float v : vec) {
    if (!std::isfinite(v)) throw Error("non-finite embedding value");
  }
  occurrences.push_back(std::move(occurrence));
  values.insert(values.end(), vec.begin(), vec.end());
}

std::uint32_t RepresentativeShard::intern(const std::string& substitute) {
  if (lookup_.size() != vocabulary.size()) {
    lookup_.clear();
    for (std::uint32_t i = 0; i < vocabulary.size(); ++i) lookup_.emplace(vocabulary[i], i);
  }
  auto [it, inserted] = lookup_.emplace(substitute, static_cast<std::uint32_t>(vocabulary.size()));
  if (inserted) vocabulary.push_back(substitute);
  return it->second;
}

void RepresentativeShard::add(Occurrence occurrence, const std::vector<std::vector<std::string>>& reps) {
  if (reps.size() != reps_per_occurrence) throw Error("wrong number of representatives");
  for (const auto& rep : reps) {
    if (rep.size() != substitutes_per_rep) throw Error("wrong number of substitutes in a representative");
  }
  for (const auto& rep : reps) {
    for (const auto& s : rep) substitutes.push_back(intern(s));
  }
  occurrences.push_back(std::move(occurrence));
}

const char* to_string(WsiMethod method) {
  switch (method) {
    case WsiMethod::kmeans:
      return "kmeans";
    case WsiMethod::spectral:
      return "spectral";
    case WsiMethod::substitution:
      return "substitution";
  }
  return "?";
}

WsiMethod parse_wsi_method(const std::string& name) {
  if (name == "kmeans") return WsiMethod::kmeans;
  if (name == "spectral") return WsiMethod::spectral;
  if (name == "substitution") return WsiMethod::substitution;
  throw Error("unknown WSI method '" + name + "' (expected kmeans, spectral or substitution)");
}

// ---------------------------------------------------------------------------

std::map<std::string, std::uint64_t> count_token_occurrences(std::span<const CorpusSlice> slices) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& slice : slices) {
    for (const auto& comment : slice.comments) {
      for (const auto& token : comment.tokens) ++counts[token];
    }
  }
  return counts;
}

std::vector<std::string> select_sense_vocab(const FrequencyTable& table,
                                            const std::map<std::string, std::uint64_t>& occurrence_counts,
                                            SenseVocabParams params) {
  std::set<std::string> frequent_somewhere;
  for (const auto& community : table.communities()) {
    for (auto& token : top_fraction_tokens(table.community_counts(community), params.top_fraction)) {
      frequent_somewhere.insert(std::move(token));
    }
  }
  std::vector<std::string> vocab;
  for (const auto& token : frequent_somewhere) {
    if (is_emoji_token(token)) continue;
    auto it = occurrence_counts.find(token);
    if (it == occurrence_counts.end() || it->second < params.min_total_occurrences) continue;
    if (table.doc_freq(token) < params.min_breadth) continue;
    vocab.push_back(token);
  }
  return vocab;
}

std::vector<Occurrence> sample_training_occurrences(const std::string& token, std::vector<Occurrence> occurrences,
                                                    std::size_t n, std::uint64_t seed) {
  if (occurrences.empty()) throw Error("no occurrences available to train senses for '" + token + "'");
  std::sort(occurrences.begin(), occurrences.end(), occurrence_key_less);
  occurrences.erase(std::unique(occurrences.begin(), occurrences.end()), occurrences.end());
  if (occurrences.size() > n) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(occurrences.size());
    for (std::size_t i = 0; i < occurrences.size(); ++i) {
      keyed.emplace_back(splitmix64(seed ^ fnv1a64(occurrence_key_string(occurrences[i]))), i);
    }
    std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(n), keyed.end());
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (std::size_t i = 0; i < n; ++i) chosen.push_back(keyed[i].second);
    std::sort(chosen.begin(), chosen.end());
    std::vector<Occurrence> kept;
    kept.reserve(n);
    for (auto i : chosen) kept.push_back(std::move(occurrences[i]));
    occurrences = std::move(kept);
  }
  return occurrences;
}

// ---------------------------------------------------------------------------

KSelection choose_k_penalized(const MatrixXd& points, double gamma, std::size_t k_max, std::size_t n_init,
                              std::uint64_t seed) {
  if (points.rows() == 0) throw Error("choose_k_penalized: no points");
  if (!(gamma > 0.0)) throw Error("choose_k_penalized: gamma must be positive");
  if (k_max == 0) throw Error("choose_k_penalized: k_max must be at least 1");
  const std::size_t upper = std::min(k_max, count_distinct_rows(points));

  KSelection selection;
  KMeansResult previous;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= upper; ++k) {
    KMeansOptions options;
    options.n_init = n_init;
    KMeansResult result = kmeans(points, k, derive_seed(seed, k), options, k > 1 ? &previous.centroids : nullptr);
    const double cost = result.rss + gamma * static_cast<double>(k);
    selection.rss.push_back(result.rss);
    selection.cost.push_back(cost);
    if (cost < best_cost) {
      best_cost = cost;
      selection.k = k;
      selection.clustering = result;
    }
    previous = std::move(result);
  }
  return selection;
}

std::size_t choose_k_eigengap(std::span<const double> eigenvalues, std::size_t max_k) {
  if (eigenvalues.size() < 2) return 1;
  const std::size_t upper = std::min(max_k, eigenvalues.size() - 1);
  std::size_t best = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= upper; ++k) {
    const double gap = eigenvalues[k] - eigenvalues[k - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

std::vector<std::vector<std::size_t>> knn_graph(const MatrixXd& points, std::size_t neighbors) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < neighbors + 1) throw Error("knn_graph: need at least K+1 points");
  const VectorXd sq = points.rowwise().squaredNorm();
  const MatrixXd gram = points * points.transpose();
  std::vector<std::vector<char>> adjacent(n, std::vector<char>(n, 0));
  std::vector<std::pair<double, std::size_t>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      candidates.emplace_back(std::max(0.0, sq[ii] + sq[jj] - 2.0 * gram(ii, jj)), j);
    }
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(neighbors),
                      candidates.end());
    for (std::size_t r = 0; r < neighbors; ++r) {
      const std::size_t j = candidates[r].second;
      adjacent[i][j] = adjacent[j][i] = 1;
    }
  }
  std::vector<std::vector<std::size_t>> graph(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacent[i][j]) graph[i].push_back(j);
    }
  }
  return graph;
}

LaplacianSpectrum normalized_laplacian_spectrum(const std::vector<std::vector<std::size_t>>& graph) {
  const auto n = static_cast<Eigen::Index>(graph.size());
  LaplacianSpectrum spectrum;
  spectrum.degrees = VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    spectrum.degrees[i] = static_cast<double>(graph[static_cast<std::size_t>(i)].size());
  }
  MatrixXd laplacian = MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (spectrum.degrees[i] == 0.0) laplacian(i, i) = 0.0;
    for (std::size_t j : graph[static_cast<std::size_t>(i)]) {
      const auto jj = static_cast<Eigen::Index>(j);
      laplacian(i, jj) -= 1.0 / std::sqrt(spectrum.degrees[i] * spectrum.degrees[jj]);
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition of the graph Laplacian failed");
  spectrum.eigenvalues = solver.eigenvalues().cwiseMax(0.0);
  spectrum.eigenvectors = solver.eigenvectors();
  return spectrum;
}

// ---------------------------------------------------------------------------

namespace {

double cosine(const VectorXd& a, const VectorXd& b, double norm_a) {
  const double nb = b.norm();
  if (norm_a == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (norm_a * nb);
}

template <typename T>
VectorXd to_vector(std::span<const T> vec) {
  VectorXd out(static_cast<Eigen::Index>(vec.size()));
  for (std::size_t i = 0; i < vec.size(); ++i) out[static_cast<Eigen::Index>(i)] = static_cast<double>(vec[i]);
  return out;
}

std::vector<SenseId> to_sense_ids(const std::vector<std::size_t>& labels) {
  return {labels.begin(), labels.end()};
}

SenseId match_kmeans_vector(const SenseModel& model, const VectorXd& vec) {
  const auto* senses = std::get_if<KMeansSenses>(&model.senses);
  if (!senses) throw Error("model for '" + model.token + "' is not a k-means model");
  if (vec.size() != senses->centroids.cols()) throw Error("embedding dimension does not match the model");
  const double norm = vec.norm();
  if (norm == 0.0) throw Error("cannot match a zero vector");
  SenseId best = 0;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < senses->centroids.rows(); ++j) {
    const double sim = cosine(vec, senses->centroids.row(j).transpose(), norm);
    if (sim > best_sim) {
      best_sim = sim;
      best = static_cast<SenseId>(j);
    }
  }
  return best;
}

SenseId match_spectral_vector(const SenseModel& model, const VectorXd& vec) {
  const auto* senses = std::get_if<SpectralSenses>(&model.senses);
  if (!senses) throw Error("model for '" + model.token + "' is not a spectral model");
  if (vec.size() != senses->exemplars.cols()) throw Error("embedding dimension does not match the model");
  const double norm = vec.norm();
  if (norm == 0.0) throw Error("cannot match a zero vector");
  const Eigen::VectorXf query = vec.cast<float>();
  SenseId best = 0;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < senses->exemplars.rows(); ++i) {
    const double en = static_cast<double>(senses->exemplars.row(i).norm());
    const double sim = en == 0.0 ? 0.0 : static_cast<double>(senses->exemplars.row(i).dot(query)) / (norm * en);
    const SenseId label = senses->labels[static_cast<std::size_t>(i)];
    if (sim > best_sim || (sim == best_sim && label < best)) {
      best_sim = sim;
      best = label;
    }
  }
  return best;
}

}  // namespace

MatrixXd gather_points(const EmbeddingShard& shard, std::span<const std::size_t> rows) {
  MatrixXd points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(shard.dim));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto vec = shard.vector(rows[r]);
    for (std::uint32_t c = 0; c < shard.dim; ++c) {
      points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<double>(vec[c]);
    }
  }
  return points;
}

SenseModel train_kmeans_senses(const std::string& token, const MatrixXd& points, KMeansSenseParams params,
                               std::uint64_t seed) {
  if (points.rows() == 0) throw Error("no embeddings to train senses for '" + token + "'");
  KSelection selection = choose_k_penalized(points, params.gamma, params.k_max, params.n_init, seed);
  SenseModel model;
  model.token = token;
  model.method = WsiMethod::kmeans;
  model.seed = seed;
  model.gamma = params.gamma;
  model.k_max = static_cast<std::uint32_t>(params.k_max);
  model.n_senses = static_cast<std::uint32_t>(selection.k);
  model.training_labels = to_sense_ids(selection.clustering.labels);
  model.senses = KMeansSenses{std::move(selection.clustering.centroids)};
  return model;
}

SenseId match_embedding(const SenseModel& model, std::span<const float> vec) {
  return match_kmeans_vector(model, to_vector(vec));
}

SenseId match_embedding(const SenseModel& model, std::span<const double> vec) {
  return match_kmeans_vector(model, to_vector(vec));
}

SenseModel train_spectral_senses(const std::string& token, const MatrixXd& points, SpectralSenseParams params,
                                 std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < params.neighbors + 1) {
    throw Error("spectral senses for '" + token + "' need at least " + std::to_string(params.neighbors + 1) +
                " embeddings, got " + std::to_string(n));
  }
  SenseModel model;
  model.token = token;
  model.method = WsiMethod::spectral;
  model.seed = seed;
  model.neighbors = static_cast<std::uint32_t>(params.neighbors);
  model.k_max = static_cast<std::uint32_t>(params.max_k);

  std::vector<std::size_t> labels(n, 0);
  const std::size_t distinct = count_distinct_rows(points);
  if (distinct > 1) {
    const auto spectrum = normalized_laplacian_spectrum(knn_graph(points, params.neighbors));
    const std::size_t available = std::min<std::size_t>(params.max_k + 1, n);
    std::vector<double> smallest(spectrum.eigenvalues.data(), spectrum.eigenvalues.data() + available);
    const std::size_t k = std::min(choose_k_eigengap(smallest, params.max_k), distinct);
    if (k > 1) {
      // Rows of D^{-1/2} U: the random-walk Laplacian's eigenvectors.
      MatrixXd embedding = spectrum.eigenvectors.leftCols(static_cast<Eigen::Index>(k));
      for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
        embedding.row(i) /= std::sqrt(spectrum.degrees[i]);
      }
      KMeansOptions options;
      options.n_init = params.n_init;
      labels = kmeans(embedding, k, seed, options).labels;
    }
  }
  relabel_by_first_appearance(labels);
  SpectralSenses senses;
  senses.exemplars = points.cast<float>();
  senses.labels = to_sense_ids(labels);
  model.n_senses = static_cast<std::uint32_t>(*std::max_element(labels.begin(), labels.end()) + 1);
  model.training_labels = senses.labels;
  model.senses = std::move(senses);
  return model;
}

SenseId match_spectral(const SenseModel& model, std::span<const float> vec) {
  return match_spectral_vector(model, to_vector(vec));
}

SenseId match_spectral(const SenseModel& model, std::span<const double> vec) {
  return match_spectral_vector(model, to_vector(vec));
}

// ---------------------------------------------------------------------------
// Substitution representatives

void SubstitutionSenses::build_index() {
  vocab_index.clear();
  for (std::uint32_t i = 0; i < vocabulary.size(); ++i) vocab_index.emplace(vocabulary[i], i);
  postings.assign(vocabulary.size(), {});
  for (std::uint32_t r = 0; r < representatives.size(); ++r) {
    for (const auto& [term, weight] : representatives[r]) postings[term].emplace_back(r, weight);
  }
}

namespace {

using TermCounts = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

TermCounts count_terms(std::vector<std::uint32_t> ids) {
  std::sort(ids.begin(), ids.end());
  TermCounts counts;
  for (auto id : ids) {
    if (!counts.empty() && counts.back().first == id) {
      ++counts.back().second;
    } else {
      counts.emplace_back(id, 1);
    }
  }
  return counts;
}

SparseVector tfidf_vector(const TermCounts& counts, const std::vector<double>& idf) {
  SparseVector vec;
  vec.reserve(counts.size());
  double norm = 0.0;
  for (const auto& [term, tf] : counts) {
    const double w = static_cast<double>(tf) * idf[term];
    vec.emplace_back(term, w);
    norm += w * w;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& entry : vec) entry.second /= norm;
  }
  return vec;
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      sum += a[i].second * b[j].second;
      ++i;
      ++j;
    } else if (a[i].first < b[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

// Plurality vote; ties go to the sense with more training representatives,
// then to the lower id.
SenseId plurality(const std::map<SenseId, std::size_t>& votes, const std::vector<std::uint64_t>& sizes) {
  SenseId best = 0;
  bool have = false;
  for (const auto& [sense, count] : votes) {
    if (!have) {
      best = sense;
      have = true;
      continue;
    }
    const auto best_count = votes.at(best);
    if (count > best_count || (count == best_count && sizes[sense] > sizes[best])) best = sense;
  }
  if (!have) {
    best = static_cast<SenseId>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  }
  return best;
}

}  // namespace

SenseModel train_substitution_senses(const std::string& token, const RepresentativeShard& shard,
                                     std::span<const std::size_t> occurrences, SubstitutionSenseParams params,
                                     std::uint64_t seed) {
  if (occurrences.empty()) throw Error("no representatives to train senses for '" + token + "'");
  if (shard.reps_per_occurrence != params.reps_per_occurrence) {
    throw Error("missing representatives for '" + token + "': expected " +
                std::to_string(params.reps_per_occurrence) + " per occurrence, shard has " +
                std::to_string(shard.reps_per_occurrence));
  }
  if (shard.substitutes.size() != shard.size() * shard.stride()) throw Error("truncated representative shard");
  const std::size_t reps = shard.reps_per_occurrence;

  // Local vocabulary in sorted string order, so ids do not depend on the shard.
  std::vector<std::uint32_t> used;
  for (auto occ : occurrences) {
    for (std::size_t r = 0; r < reps; ++r) {
      for (auto id : shard.representative(occ, r)) used.push_back(id);
    }
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::sort(used.begin(), used.end(),
            [&](std::uint32_t a, std::uint32_t b) { return shard.vocabulary[a] < shard.vocabulary[b]; });
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  SubstitutionSenses senses;
  for (auto id : used) {
    local.emplace(id, static_cast<std::uint32_t>(senses.vocabulary.size()));
    senses.vocabulary.push_back(shard.vocabulary[id]);
  }

  // Count vectors per representative, deduplicated.
  const std::size_t total_reps = occurrences.size() * reps;
  std::map<TermCounts, std::uint32_t> unique_index;
  std::vector<TermCounts> unique_counts;
  std::vector<std::uint32_t> rep_to_unique(total_reps);
  std::vector<std::uint64_t> doc_freq(senses.vocabulary.size(), 0);
  for (std::size_t o = 0; o < occurrences.size(); ++o) {
    for (std::size_t r = 0; r < reps; ++r) {
      std::vector<std::uint32_t> ids;
      for (auto id : shard.representative(occurrences[o], r)) ids.push_back(local.at(id));
      TermCounts counts = count_terms(std::move(ids));
      for (const auto& entry : counts) ++doc_freq[entry.first];
      auto [it, inserted] = unique_index.emplace(counts, static_cast<std::uint32_t>(unique_counts.size()));
      if (inserted) {
        unique_counts.push_back(std::move(counts));
        senses.multiplicity.push_back(0);
      }
      ++senses.multiplicity[it->second];
      rep_to_unique[o * reps + r] = it->second;
    }
  }

  // Smoothed idf: ln((1 + N) / (1 + df)) + 1.
  senses.idf.resize(senses.vocabulary.size());
  for (std::size_t t = 0; t < doc_freq.size(); ++t) {
    senses.idf[t] = std::log((1.0 + static_cast<double>(total_reps)) / (1.0 + static_cast<double>(doc_freq[t]))) + 1.0;
  }
  for (const auto& counts : unique_counts) senses.representatives.push_back(tfidf_vector(counts, senses.idf));

  const std::size_t m = senses.representatives.size();
  std::vector<double> weights(senses.multiplicity.begin(), senses.multiplicity.end());
  const auto merges = average_linkage(
      m,
      [&](std::size_t i, std::size_t j) {
        return std::max(0.0, 1.0 - sparse_dot(senses.representatives[i], senses.representatives[j]));
      },
      weights);
  std::vector<std::size_t> labels = cut_max_clusters(m, merges, std::max<std::size_t>(1, params.max_clusters));

  // Fold clusters holding fewer than min_cluster_fraction of all
  // representatives into the nearest remaining cluster by centroid cosine.
  std::size_t n_clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::uint64_t> sizes(n_clusters, 0);
  std::vector<std::map<std::uint32_t, double>> centroid_maps(n_clusters);
  for (std::size_t u = 0; u < m; ++u) {
    sizes[labels[u]] += senses.multiplicity[u];
    for (const auto& [term, w] : senses.representatives[u]) {
      centroid_maps[labels[u]][term] += w * senses.multiplicity[u];
    }
  }
  std::vector<SparseVector> centroids(n_clusters);
  for (std::size_t c = 0; c < n_clusters; ++c) {
    double norm = 0.0;
    for (const auto& [term, w] : centroid_maps[c]) norm += w * w;
    norm = std::sqrt(norm);
    for (const auto& [term, w] : centroid_maps[c]) centroids[c].emplace_back(term, norm > 0 ? w / norm : 0.0);
  }
  const double threshold = params.min_cluster_fraction * static_cast<double>(total_reps);
  std::vector<std::size_t> large;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (static_cast<double>(sizes[c]) >= threshold) large.push_back(c);
  }
  if (large.empty()) {
    large.push_back(static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin()));
  }
  std::vector<std::size_t> target(n_clusters);
  std::iota(target.begin(), target.end(), 0);
  for (std::size_t c = 0; c < n_clusters; ++c) {
    if (std::find(large.begin(), large.end(), c) != large.end()) continue;
    std::size_t best = large.front();
    double best_sim = -std::numeric_limits<double>::infinity();
    for (auto l : large) {
      const double sim = sparse_dot(centroids[c], centroids[l]);
      if (sim > best_sim || (sim == best_sim && sizes[l] > sizes[best])) {
        best_sim = sim;
        best = l;
      }
    }
    target[c] = best;
  }

  // Final sense ids by first appearance in training order.
  std::vector<std::size_t> rep_labels(total_reps);
  for (std::size_t i = 0; i < total_reps; ++i) rep_labels[i] = target[labels[rep_to_unique[i]]];
  const auto old_of_new = relabel_by_first_appearance(rep_labels);
  std::vector<std::size_t> new_of_old(n_clusters, 0);
  for (std::size_t s = 0; s < old_of_new.size(); ++s) new_of_old[old_of_new[s]] = s;
  senses.labels.resize(m);
  for (std::size_t u = 0; u < m; ++u) senses.labels[u] = static_cast<SenseId>(new_of_old[target[labels[u]]]);
  senses.cluster_sizes.assign(old_of_new.size(), 0);
  for (auto l : rep_labels) ++senses.cluster_sizes[l];

  SenseModel model;
  model.token = token;
  model.method = WsiMethod::substitution;
  model.seed = seed;
  model.max_clusters = static_cast<std::uint32_t>(params.max_clusters);
  model.n_senses = static_cast<std::uint32_t>(old_of_new.size());
  model.training_labels.reserve(occurrences.size());
  for (std::size_t o = 0; o < occurrences.size(); ++o) {
    std::map<SenseId, std::size_t> votes;
    for (std::size_t r = 0; r < reps; ++r) ++votes[static_cast<SenseId>(rep_labels[o * reps + r])];
    model.training_labels.push_back(plurality(votes, senses.cluster_sizes));
  }
  senses.build_index();
  model.senses = std::move(senses);
  return model;
}

SenseModel train_substitution_senses(const std::string& token, const std::vector<RepresentativeSet>& reps,
                                     SubstitutionSenseParams params, std::uint64_t seed) {
  if (reps.empty()) throw Error("no representatives to train senses for '" + token + "'");
  RepresentativeShard shard;
  shard.reps_per_occurrence = static_cast<std::uint32_t>(reps.front().size());
  shard.substitutes_per_rep = reps.front().empty() ? 0 : static_cast<std::uint32_t>(reps.front().front().size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].size() != params.reps_per_occurrence) {
      throw Error("missing representatives for occurrence " + std::to_string(i) + " of '" + token + "'");
    }
    shard.add(Occurrence{token, "", std::to_string(i), 0, ""}, reps[i]);
  }
  std::vector<std::size_t> rows(reps.size());
  std::iota(rows.begin(), rows.end(), 0);
  return train_substitution_senses(token, shard, rows, params, seed);
}

namespace {

SenseId match_substitution_ids(const SubstitutionSenses& senses,
                               const std::vector<std::vector<std::uint32_t>>& reps) {
  std::map<SenseId, std::size_t> votes;
  std::vector<double> scores(senses.representatives.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& ids : reps) {
    const SparseVector query = tfidf_vector(count_terms(ids), senses.idf);
    touched.clear();
    for (const auto& [term, w] : query) {
      for (const auto& [rep, weight] : senses.postings[term]) {
        if (scores[rep] == 0.0) touched.push_back(rep);
        scores[rep] += w * weight;
      }
    }
    std::uint32_t best = 0;
    double best_score = 0.0;
    for (auto rep : touched) {
      if (scores[rep] > best_score || (scores[rep] == best_score && rep < best)) {
        best_score = scores[rep];
        best = rep;
      }
      scores[rep] = 0.0;
    }
    // A representative sharing no substitute with training data abstains.
    if (best_score > 0.0) ++votes[senses.labels[best]];
  }
  return plurality(votes, senses.cluster_sizes);
}

const SubstitutionSenses& substitution_payload(const SenseModel& model) {
  const auto* senses = std::get_if<SubstitutionSenses>(&model.senses);
  if (!senses) throw Error("model for '" + model.token + "' is not a substitution model");
  return *senses;
}

}  // namespace

SenseId match_substitution(const SenseModel& model, const RepresentativeShard& shard, std::size_t occurrence) {
  const auto& senses = substitution_payload(model);
  std::vector<std::vector<std::uint32_t>> reps(shard.reps_per_occurrence);
  for (std::size_t r = 0; r < shard.reps_per_occurrence; ++r) {
    for (auto id : shard.representative(occurrence, r)) {
      auto it = senses.vocab_index.find(shard.vocabulary[id]);
      if (it != senses.vocab_index.end()) reps[r].push_back(it->second);
    }
  }
  return match_substitution_ids(senses, reps);
}

SenseId match_substitution(const SenseModel& model, const RepresentativeSet& reps) {
  const auto& senses = substitution_payload(model);
  std::vector<std::vector<std::uint32_t>> ids(reps.size());
  for (std::size_t r = 0; r < reps.size(); ++r) {
    for (const auto& s : reps[r]) {
      auto it = senses.vocab_index.find(s);
      if (it != senses.vocab_index.end()) ids[r].push_back(it->second);
    }
  }
  return match_substitution_ids(senses, ids);
}

// ---------------------------------------------------------------------------

void write_assignments(std::ostream& out, const std::vector<SenseAssignment>& rows,
                       const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (const auto& row : rows) {
    const auto& o = row.occurrence;
    out << o.token << '\t' << o.community << '\t' << o.comment_id << '\t' << o.position << '\t' << o.user << '\t'
        << row.sense << '\n';
  }
}

std::vector<SenseAssignment> read_assignments(std::istream& in) {
  std::vector<SenseAssignment> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = split(line, '\t');
    if (f.size() != 6) throw Error("assignment line " + std::to_string(line_no) + ": expected 6 columns");
    SenseAssignment row;
    row.occurrence = Occurrence{f[0], f[1], f[2], static_cast<std::uint32_t>(std::stoul(f[3])), f[4]};
    row.sense = static_cast<SenseId>(std::stoul(f[5]));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lexvar
