#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexvar/wsi.hpp"

namespace lexvar {

// ---------------------------------------------------------------------------
// Clustering agreement. `pred` and `gold` hold one label per item.

double paired_fscore(std::span<const std::string> pred, std::span<const std::string> gold);

struct VMeasure {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v = 0.0;
};
/// Entropy-based (natural log). Homogeneity is 1 when the gold labels have
/// zero entropy; completeness is 1 when the predicted labels do.
VMeasure v_measure(std::span<const std::string> pred, std::span<const std::string> gold);

/// I(pred; gold) / max(H(pred), H(gold)); 1 when both entropies are zero.
double nmi(std::span<const std::string> pred, std::span<const std::string> gold);

struct BCubed {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};
BCubed bcubed(std::span<const std::string> pred, std::span<const std::string> gold);

/// Hubert-Arabie adjusted Rand index; 1 for identical partitions.
double adjusted_rand(std::span<const std::string> pred, std::span<const std::string> gold);

template <typename Label>
std::vector<std::string> label_strings(std::span<const Label> labels) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(std::to_string(l));
  return out;
}

// ---------------------------------------------------------------------------
// Labeled WSI data

struct LabeledInstance {
  std::string instance_id;
  std::string lemma;
  std::vector<std::string> tokens;  // context
  std::size_t target = 0;           // index into tokens
  std::string gold_sense;
};

struct KeyLoadStats {
  std::size_t instances = 0;
  std::size_t skipped_without_key = 0;
};

/// Parses "lemma instance_id sense[/weight] ..." lines; the first listed
/// sense wins. Returns instance_id -> sense.
std::map<std::string, std::string> read_sense_key(std::istream& in);

/// Reads <instance id=".." lemma=".." tokenStart=".." tokenEnd="..">text</instance>
/// elements (the SemEval 2013 layout). Gold labels come from `key`;
/// instances without a key entry are skipped and counted, or kept with an
/// empty label when `keep_unkeyed` is set (training data needs no labels).
std::vector<LabeledInstance> read_semeval_instances(std::istream& xml, const std::map<std::string, std::string>& key,
                                                    KeyLoadStats* stats = nullptr, bool keep_unkeyed = false);

/// Occurrence key used for benchmark instances in shards: token = lemma,
/// community = "semeval", comment_id = instance id, position = target.
Occurrence instance_occurrence(const LabeledInstance& instance);

// ---------------------------------------------------------------------------
// Train/match protocol

struct ProtocolParams {
  WsiMethod method = WsiMethod::kmeans;
  std::size_t train_cap = 500;
  KMeansSenseParams kmeans;
  SpectralSenseParams spectral;
  SubstitutionSenseParams substitution;
};

/// Representations of every instance, looked up by occurrence key. Only the
/// shard the method needs has to be present.
struct ProtocolData {
  const EmbeddingShard* embeddings = nullptr;
  const RepresentativeShard* representatives = nullptr;
};

/// Per lemma: trains on at most train_cap training instances (seeded
/// sample), then matches every test instance. Returns test instance id ->
/// predicted label "lemma.sense".
std::map<std::string, std::string> run_protocol(std::span<const LabeledInstance> train,
                                                std::span<const LabeledInstance> test, const ProtocolData& data,
                                                const ProtocolParams& params, std::uint64_t seed, unsigned jobs = 1);

/// The all-one-cluster baseline: every instance of a lemma gets one label.
std::map<std::string, std::string> most_frequent_sense_baseline(std::span<const LabeledInstance> test);

struct EvaluationScores {
  double fscore = 0.0;
  double v_measure = 0.0;
  double nmi = 0.0;
  double bcubed = 0.0;
  std::size_t lemmas = 0;
  std::size_t instances = 0;
};

/// Unweighted means over lemmas of each measure. Instances missing from
/// `predicted` are an error.
EvaluationScores evaluate(std::span<const LabeledInstance> test, const std::map<std::string, std::string>& predicted);

struct RunSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single run
};
RunSummary summarize(std::span<const double> values);

/// Table with F, V, sqrt(F*V), NMI, B-Cubed, sqrt(NMI*B) as mean +- sd rows.
void write_benchmark_table(std::ostream& out, const std::map<std::string, std::vector<EvaluationScores>>& runs);

}  // namespace lexvar
