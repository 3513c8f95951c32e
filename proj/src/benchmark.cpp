#include "lexvar/benchmark.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "lexvar/text.hpp"
#include "lexvar/util.hpp"

namespace lexvar {
namespace {

// Contingency table between two labelings.
struct Contingency {
  std::vector<std::size_t> pred;  // label index per item
  std::vector<std::size_t> gold;
  std::vector<double> pred_sizes;
  std::vector<double> gold_sizes;
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  double n = 0.0;
};

std::vector<std::size_t> encode(std::span<const std::string> labels, std::vector<double>& sizes) {
  std::map<std::string, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    auto [it, inserted] = ids.emplace(l, ids.size());
    if (inserted) sizes.push_back(0.0);
    sizes[it->second] += 1.0;
    out.push_back(it->second);
  }
  return out;
}

Contingency contingency(std::span<const std::string> pred, std::span<const std::string> gold) {
  if (pred.size() != gold.size()) throw Error("predicted and gold labelings differ in length");
  if (pred.empty()) throw Error("cannot compare empty labelings");
  Contingency c;
  c.pred = encode(pred, c.pred_sizes);
  c.gold = encode(gold, c.gold_sizes);
  for (std::size_t i = 0; i < pred.size(); ++i) c.cells[{c.pred[i], c.gold[i]}] += 1.0;
  c.n = static_cast<double>(pred.size());
  return c;
}

double entropy(const std::vector<double>& sizes, double n) {
  double h = 0.0;
  for (double s : sizes) {
    if (s > 0.0) h -= s / n * std::log(s / n);
  }
  return h;
}

double mutual_information(const Contingency& c) {
  double mi = 0.0;
  for (const auto& [cell, nij] : c.cells) {
    mi += nij / c.n * std::log(c.n * nij / (c.pred_sizes[cell.first] * c.gold_sizes[cell.second]));
  }
  return std::max(0.0, mi);
}

double pairs(double k) { return k * (k - 1.0) / 2.0; }

double harmonic(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

}  // namespace

double paired_fscore(std::span<const std::string> pred, std::span<const std::string> gold) {
  const auto c = contingency(pred, gold);
  double both = 0.0, pred_pairs = 0.0, gold_pairs = 0.0;
  for (const auto& [cell, nij] : c.cells) both += pairs(nij);
  for (double s : c.pred_sizes) pred_pairs += pairs(s);
  for (double s : c.gold_sizes) gold_pairs += pairs(s);
  if (pred_pairs == 0.0 && gold_pairs == 0.0) return 1.0;
  if (pred_pairs == 0.0 || gold_pairs == 0.0) return 0.0;
  return harmonic(both / pred_pairs, both / gold_pairs);
}

VMeasure v_measure(std::span<const std::string> pred, std::span<const std::string> gold) {
  const auto c = contingency(pred, gold);
  const double h_gold = entropy(c.gold_sizes, c.n);
  const double h_pred = entropy(c.pred_sizes, c.n);
  // Conditional entropies summed cell by cell, so pure cells contribute 0.
  double h_gold_given_pred = 0.0, h_pred_given_gold = 0.0;
  for (const auto& [cell, nij] : c.cells) {
    h_gold_given_pred -= nij / c.n * std::log(nij / c.pred_sizes[cell.first]);
    h_pred_given_gold -= nij / c.n * std::log(nij / c.gold_sizes[cell.second]);
  }
  VMeasure v;
  v.homogeneity = h_gold == 0.0 ? 1.0 : std::clamp(1.0 - h_gold_given_pred / h_gold, 0.0, 1.0);
  v.completeness = h_pred == 0.0 ? 1.0 : std::clamp(1.0 - h_pred_given_gold / h_pred, 0.0, 1.0);
  v.v = harmonic(v.homogeneity, v.completeness);
  return v;
}

double nmi(std::span<const std::string> pred, std::span<const std::string> gold) {
  const auto c = contingency(pred, gold);
  const double denom = std::max(entropy(c.pred_sizes, c.n), entropy(c.gold_sizes, c.n));
  if (denom == 0.0) return 1.0;
  return std::clamp(mutual_information(c) / denom, 0.0, 1.0);
}

BCubed bcubed(std::span<const std::string> pred, std::span<const std::string> gold) {
  const auto c = contingency(pred, gold);
  BCubed b;
  for (std::size_t i = 0; i < c.pred.size(); ++i) {
    const double overlap = c.cells.at({c.pred[i], c.gold[i]});
    b.precision += overlap / c.pred_sizes[c.pred[i]];
    b.recall += overlap / c.gold_sizes[c.gold[i]];
  }
  b.precision /= c.n;
  b.recall /= c.n;
  b.f = harmonic(b.precision, b.recall);
  return b;
}

double adjusted_rand(std::span<const std::string> pred, std::span<const std::string> gold) {
  const auto c = contingency(pred, gold);
  if (c.n < 2) return 1.0;
  double index = 0.0, a = 0.0, b = 0.0;
  for (const auto& [cell, nij] : c.cells) index += pairs(nij);
  for (double s : c.pred_sizes) a += pairs(s);
  for (double s : c.gold_sizes) b += pairs(s);
  const double expected = a * b / pairs(c.n);
  const double max_index = (a + b) / 2.0;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> read_sense_key(std::istream& in) {
  std::map<std::string, std::string> key;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string lemma, id, sense;
    if (!(fields >> lemma >> id >> sense)) continue;
    sense = sense.substr(0, sense.find('/'));
    key.emplace(id, sense);
  }
  return key;
}

namespace {

std::string decode_entities(std::string_view s) {
  static const std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool replaced = false;
    if (s[i] == '&') {
      for (const auto& [name, ch] : kEntities) {
        if (s.substr(i, name.size()) == name) {
          out += ch;
          i += name.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += s[i++];
  }
  return out;
}

std::map<std::string, std::string> parse_attributes(std::string_view tag) {
  std::map<std::string, std::string> attrs;
  std::size_t i = 0;
  while (i < tag.size()) {
    while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    const auto eq = tag.find('=', i);
    if (eq == std::string_view::npos) break;
    const std::string name(trim(tag.substr(i, eq - i)));
    auto q = eq + 1;
    while (q < tag.size() && std::isspace(static_cast<unsigned char>(tag[q]))) ++q;
    if (q >= tag.size() || (tag[q] != '"' && tag[q] != '\'')) break;
    const char quote = tag[q];
    const auto end = tag.find(quote, q + 1);
    if (end == std::string_view::npos) break;
    attrs[name] = decode_entities(tag.substr(q + 1, end - q - 1));
    i = end + 1;
  }
  return attrs;
}

// Byte offset of the given code point index in UTF-8 text.
std::size_t byte_offset(const std::string& text, std::size_t code_points) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) continue;
    if (seen == code_points) return i;
    ++seen;
  }
  if (seen == code_points) return text.size();
  throw Error("character offset beyond instance text");
}

}  // namespace

std::vector<LabeledInstance> read_semeval_instances(std::istream& xml, const std::map<std::string, std::string>& key,
                                                    KeyLoadStats* stats, bool keep_unkeyed) {
  const std::string doc((std::istreambuf_iterator<char>(xml)), std::istreambuf_iterator<char>());
  std::vector<LabeledInstance> out;
  KeyLoadStats local;
  std::size_t pos = 0;
  while ((pos = doc.find("<instance", pos)) != std::string::npos) {
    const auto after = pos + 9;
    if (after < doc.size() && doc[after] == 's') {  // <instances ...>
      pos = after;
      continue;
    }
    const auto tag_end = doc.find('>', pos);
    const auto close = doc.find("</instance>", tag_end);
    if (tag_end == std::string::npos || close == std::string::npos) throw Error("unterminated <instance> element");
    auto attrs = parse_attributes(std::string_view(doc).substr(after, tag_end - after));
    const std::string text = decode_entities(std::string_view(doc).substr(tag_end + 1, close - tag_end - 1));
    pos = close + 11;

    ++local.instances;
    const auto id = attrs["id"];
    if (id.empty()) throw Error("<instance> without id");
    auto k = key.find(id);
    if (k == key.end() && !keep_unkeyed) {
      ++local.skipped_without_key;
      continue;
    }
    if (!attrs.count("tokenStart") || !attrs.count("tokenEnd")) throw Error("instance " + id + " lacks token offsets");
    const auto start = byte_offset(text, std::stoul(attrs["tokenStart"]));
    const auto end = byte_offset(text, std::stoul(attrs["tokenEnd"]));
    if (end < start) throw Error("instance " + id + " has inverted token offsets");

    LabeledInstance inst;
    inst.instance_id = id;
    inst.lemma = attrs.count("lemma") ? attrs["lemma"] : id.substr(0, id.rfind('.'));
    if (attrs.count("partOfSpeech") && inst.lemma.find('.') == std::string::npos) {
      inst.lemma += "." + attrs["partOfSpeech"];
    }
    inst.tokens = normalize_and_tokenize(text.substr(0, start));
    inst.target = inst.tokens.size();
    inst.tokens.push_back(unicode_lowercase(text.substr(start, end - start)));
    for (auto& t : normalize_and_tokenize(text.substr(end))) inst.tokens.push_back(std::move(t));
    if (k != key.end()) inst.gold_sense = k->second;
    out.push_back(std::move(inst));
  }
  if (stats) *stats = local;
  return out;
}

Occurrence instance_occurrence(const LabeledInstance& instance) {
  return {instance.lemma, "semeval", instance.instance_id, static_cast<std::uint32_t>(instance.target),
          instance.instance_id};
}

// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::vector<const LabeledInstance*>> by_lemma(std::span<const LabeledInstance> instances) {
  std::map<std::string, std::vector<const LabeledInstance*>> out;
  for (const auto& inst : instances) out[inst.lemma].push_back(&inst);
  return out;
}

template <typename Shard>
std::unordered_map<std::string, std::size_t> index_rows(const Shard& shard) {
  std::unordered_map<std::string, std::size_t> rows;
  for (std::size_t i = 0; i < shard.occurrences.size(); ++i) rows.emplace(occurrence_key_string(shard.occurrences[i]), i);
  return rows;
}

std::size_t row_of(const std::unordered_map<std::string, std::size_t>& rows, const LabeledInstance& inst) {
  auto it = rows.find(occurrence_key_string(instance_occurrence(inst)));
  if (it == rows.end()) throw Error("no representation for instance " + inst.instance_id);
  return it->second;
}

}  // namespace

std::map<std::string, std::string> run_protocol(std::span<const LabeledInstance> train,
                                                std::span<const LabeledInstance> test, const ProtocolData& data,
                                                const ProtocolParams& params, std::uint64_t seed, unsigned jobs) {
  const bool embedding = params.method != WsiMethod::substitution;
  if (embedding && !data.embeddings) throw Error("the protocol needs an embedding shard for this method");
  if (!embedding && !data.representatives) throw Error("the protocol needs a representative shard for this method");
  const auto rows = embedding ? index_rows(*data.embeddings) : index_rows(*data.representatives);

  const auto train_by = by_lemma(train);
  const auto test_by = by_lemma(test);
  std::vector<std::string> lemmas;
  for (const auto& [lemma, list] : test_by) lemmas.push_back(lemma);
  std::vector<std::vector<std::pair<std::string, std::string>>> results(lemmas.size());

  parallel_for(lemmas.size(), jobs, [&](std::size_t li) {
    const auto& lemma = lemmas[li];
    auto t = train_by.find(lemma);
    if (t == train_by.end()) throw Error("no training instances for lemma " + lemma);
    const auto lemma_seed = derive_seed(seed, lemma);
    std::vector<Occurrence> occs;
    for (const auto* inst : t->second) occs.push_back(instance_occurrence(*inst));
    const auto sample = sample_training_occurrences(lemma, std::move(occs), params.train_cap, lemma_seed);
    std::vector<std::size_t> train_rows;
    for (const auto& o : sample) {
      auto it = rows.find(occurrence_key_string(o));
      if (it == rows.end()) throw Error("no representation for training instance " + o.comment_id);
      train_rows.push_back(it->second);
    }

    SenseModel model;
    switch (params.method) {
      case WsiMethod::kmeans:
        model = train_kmeans_senses(lemma, gather_points(*data.embeddings, train_rows), params.kmeans, lemma_seed);
        break;
      case WsiMethod::spectral:
        model = train_spectral_senses(lemma, gather_points(*data.embeddings, train_rows), params.spectral, lemma_seed);
        break;
      case WsiMethod::substitution:
        model = train_substitution_senses(lemma, *data.representatives, train_rows, params.substitution, lemma_seed);
        break;
    }
    for (const auto* inst : test_by.at(lemma)) {
      const auto row = row_of(rows, *inst);
      SenseId sense = 0;
      switch (params.method) {
        case WsiMethod::kmeans:
          sense = match_embedding(model, data.embeddings->vector(row));
          break;
        case WsiMethod::spectral:
          sense = match_spectral(model, data.embeddings->vector(row));
          break;
        case WsiMethod::substitution:
          sense = match_substitution(model, *data.representatives, row);
          break;
      }
      results[li].emplace_back(inst->instance_id, lemma + "." + std::to_string(sense));
    }
  });

  std::map<std::string, std::string> predicted;
  for (const auto& list : results) {
    for (const auto& [id, label] : list) predicted[id] = label;
  }
  return predicted;
}

std::map<std::string, std::string> most_frequent_sense_baseline(std::span<const LabeledInstance> test) {
  std::map<std::string, std::string> predicted;
  for (const auto& inst : test) predicted[inst.instance_id] = inst.lemma + ".0";
  return predicted;
}

EvaluationScores evaluate(std::span<const LabeledInstance> test, const std::map<std::string, std::string>& predicted) {
  EvaluationScores scores;
  for (const auto& [lemma, list] : by_lemma(test)) {
    std::vector<std::string> pred, gold;
    for (const auto* inst : list) {
      auto it = predicted.find(inst->instance_id);
      if (it == predicted.end()) throw Error("no prediction for instance " + inst->instance_id);
      pred.push_back(it->second);
      gold.push_back(inst->gold_sense);
    }
    scores.fscore += paired_fscore(pred, gold);
    scores.v_measure += v_measure(pred, gold).v;
    scores.nmi += nmi(pred, gold);
    scores.bcubed += bcubed(pred, gold).f;
    ++scores.lemmas;
    scores.instances += list.size();
  }
  if (scores.lemmas == 0) throw Error("no test instances to evaluate");
  const auto n = static_cast<double>(scores.lemmas);
  scores.fscore /= n;
  scores.v_measure /= n;
  scores.nmi /= n;
  scores.bcubed /= n;
  return scores;
}

RunSummary summarize(std::span<const double> values) {
  if (values.empty()) throw Error("nothing to summarize");
  RunSummary s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

void write_benchmark_table(std::ostream& out, const std::map<std::string, std::vector<EvaluationScores>>& runs) {
  out << "method\tF\tV\tsqrt(FV)\tNMI\tB-Cubed\tsqrt(NMI*B)\n";
  const auto cell = [](std::vector<double> v) {
    const auto s = summarize(v);
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << s.mean << " +- " << s.sd;
    return os.str();
  };
  for (const auto& [method, list] : runs) {
    std::vector<double> f, v, fv, n, b, nb;
    for (const auto& r : list) {
      f.push_back(r.fscore);
      v.push_back(r.v_measure);
      fv.push_back(std::sqrt(r.fscore * r.v_measure));
      n.push_back(r.nmi);
      b.push_back(r.bcubed);
      nb.push_back(std::sqrt(r.nmi * r.bcubed));
    }
    out << method << '\t' << cell(f) << '\t' << cell(v) << '\t' << cell(fv) << '\t' << cell(n) << '\t' << cell(b)
        << '\t' << cell(nb) << '\n';
  }
}

}  // namespace lexvar
