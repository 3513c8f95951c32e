#include <istream>
#include <ostream>

#include "binary_io.hpp"
#include "lexvar/shards.hpp"

namespace lexvar {
namespace {

using namespace binary;

void put_labels(std::ostream& out, const std::vector<SenseId>& labels) {
  put_u64(out, labels.size());
  for (auto l : labels) put_u32(out, l);
}

std::vector<SenseId> get_labels(std::istream& in) {
  const auto n = get_u64(in);
  if (n > (1ull << 32)) throw Error("corrupt label count in model file");
  std::vector<SenseId> labels(static_cast<std::size_t>(n));
  for (auto& l : labels) l = get_u32(in);
  return labels;
}

void write_model(std::ostream& out, const SenseModel& m) {
  put_string(out, m.token);
  put_u8(out, static_cast<std::uint8_t>(m.method));
  put_u32(out, m.n_senses);
  put_u64(out, m.seed);
  put_f64(out, m.gamma);
  put_u32(out, m.k_max);
  put_u32(out, m.neighbors);
  put_u32(out, m.max_clusters);
  put_labels(out, m.training_labels);

  if (const auto* k = std::get_if<KMeansSenses>(&m.senses)) {
    put_u32(out, static_cast<std::uint32_t>(k->centroids.rows()));
    put_u32(out, static_cast<std::uint32_t>(k->centroids.cols()));
    for (Eigen::Index i = 0; i < k->centroids.rows(); ++i) {
      for (Eigen::Index j = 0; j < k->centroids.cols(); ++j) put_f64(out, k->centroids(i, j));
    }
  } else if (const auto* s = std::get_if<SpectralSenses>(&m.senses)) {
    put_u32(out, static_cast<std::uint32_t>(s->exemplars.rows()));
    put_u32(out, static_cast<std::uint32_t>(s->exemplars.cols()));
    for (Eigen::Index i = 0; i < s->exemplars.rows(); ++i) {
      for (Eigen::Index j = 0; j < s->exemplars.cols(); ++j) put_f32(out, s->exemplars(i, j));
    }
    put_labels(out, s->labels);
  } else {
    const auto& sub = std::get<SubstitutionSenses>(m.senses);
    put_u32(out, static_cast<std::uint32_t>(sub.vocabulary.size()));
    for (std::size_t t = 0; t < sub.vocabulary.size(); ++t) {
      put_string(out, sub.vocabulary[t]);
      put_f64(out, sub.idf[t]);
    }
    put_u32(out, static_cast<std::uint32_t>(sub.representatives.size()));
    for (std::size_t r = 0; r < sub.representatives.size(); ++r) {
      put_u32(out, sub.labels[r]);
      put_u32(out, sub.multiplicity[r]);
      put_u32(out, static_cast<std::uint32_t>(sub.representatives[r].size()));
      for (const auto& [term, w] : sub.representatives[r]) {
        put_u32(out, term);
        put_f64(out, w);
      }
    }
    put_u32(out, static_cast<std::uint32_t>(sub.cluster_sizes.size()));
    for (auto c : sub.cluster_sizes) put_u64(out, c);
  }
}

SenseModel read_model(std::istream& in) {
  SenseModel m;
  m.token = get_string(in);
  const auto method = get_u8(in);
  if (method > static_cast<std::uint8_t>(WsiMethod::substitution)) throw Error("unknown method tag in model file");
  m.method = static_cast<WsiMethod>(method);
  m.n_senses = get_u32(in);
  m.seed = get_u64(in);
  m.gamma = get_f64(in);
  m.k_max = get_u32(in);
  m.neighbors = get_u32(in);
  m.max_clusters = get_u32(in);
  m.training_labels = get_labels(in);

  switch (m.method) {
    case WsiMethod::kmeans: {
      const auto rows = get_u32(in);
      const auto cols = get_u32(in);
      KMeansSenses k;
      k.centroids.resize(rows, cols);
      for (std::uint32_t i = 0; i < rows; ++i) {
        for (std::uint32_t j = 0; j < cols; ++j) k.centroids(i, j) = get_f64(in);
      }
      m.senses = std::move(k);
      break;
    }
    case WsiMethod::spectral: {
      const auto rows = get_u32(in);
      const auto cols = get_u32(in);
      SpectralSenses s;
      s.exemplars.resize(rows, cols);
      for (std::uint32_t i = 0; i < rows; ++i) {
        for (std::uint32_t j = 0; j < cols; ++j) s.exemplars(i, j) = get_f32(in);
      }
      s.labels = get_labels(in);
      if (s.labels.size() != rows) throw Error("spectral model label count mismatch");
      m.senses = std::move(s);
      break;
    }
    case WsiMethod::substitution: {
      SubstitutionSenses sub;
      const auto vocab = get_u32(in);
      for (std::uint32_t t = 0; t < vocab; ++t) {
        sub.vocabulary.push_back(get_string(in));
        sub.idf.push_back(get_f64(in));
      }
      const auto reps = get_u32(in);
      for (std::uint32_t r = 0; r < reps; ++r) {
        sub.labels.push_back(get_u32(in));
        sub.multiplicity.push_back(get_u32(in));
        SparseVector vec(get_u32(in));
        for (auto& [term, w] : vec) {
          term = get_u32(in);
          if (term >= vocab) throw Error("substitution model term outside its vocabulary");
          w = get_f64(in);
        }
        sub.representatives.push_back(std::move(vec));
      }
      const auto clusters = get_u32(in);
      for (std::uint32_t c = 0; c < clusters; ++c) sub.cluster_sizes.push_back(get_u64(in));
      for (auto l : sub.labels) {
        if (l >= clusters) throw Error("substitution model label outside its clusters");
      }
      sub.build_index();
      m.senses = std::move(sub);
      break;
    }
  }
  return m;
}

}  // namespace

void write_sense_models(std::ostream& out, const SenseModelFile& file) {
  out.write("SNSM", 4);
  put_u32(out, kModelVersion);
  put_string(out, file.provenance);
  put_u64(out, file.models.size());
  for (const auto& m : file.models) write_model(out, m);
}

SenseModelFile read_sense_models(std::istream& in) {
  expect_magic(in, "SNSM", "sense model");
  const auto version = get_u32(in);
  if (version != kModelVersion) throw Error("unsupported sense model version " + std::to_string(version));
  SenseModelFile file;
  file.provenance = get_string(in);
  const auto n = get_u64(in);
  for (std::uint64_t i = 0; i < n; ++i) file.models.push_back(read_model(in));
  return file;
}

}  // namespace lexvar
