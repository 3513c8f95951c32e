#include "lexvar/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "lexvar/text.hpp"

namespace lexvar {
namespace {

const FrequencyTable::Counts kEmptyCounts;

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a",      "about",  "above", "after", "again",  "against", "all",   "am",     "an",
      "and",    "any",    "are",   "as",    "at",     "be",      "because", "been", "before",
      "being",  "below",  "between", "both", "but",   "by",      "can",   "could",  "did",
      "do",     "does",   "doing", "don",   "down",   "during",  "each",  "few",    "for",
      "from",   "further", "had",  "has",   "have",   "having",  "he",    "her",    "here",
      "hers",   "herself", "him",  "himself", "his",  "how",     "i",     "if",     "in",
      "into",   "is",     "it",    "its",   "itself", "just",    "ll",    "m",      "me",
      "more",   "most",   "my",    "myself", "no",    "nor",     "not",   "now",    "of",
      "off",    "on",     "once",  "only",  "or",     "other",   "our",   "ours",   "ourselves",
      "out",    "over",   "own",   "re",    "s",      "same",    "she",   "should", "so",
      "some",   "such",   "t",     "than",  "that",   "the",     "their", "theirs", "them",
      "themselves", "then", "there", "these", "they", "this",    "those", "through", "to",
      "too",    "under",  "until", "up",    "ve",     "very",    "was",   "we",     "were",
      "what",   "when",   "where", "which", "while",  "who",     "whom",  "why",    "will",
      "with",   "would",  "you",   "your",  "yours",  "yourself", "yourselves", "d", "y"};
  return kWords;
}

}  // namespace

void FrequencyTable::add_community(const std::string& community, const Counts& counts) {
  if (counts_.count(community)) throw Error("duplicate community in frequency table: " + community);
  Counts& stored = counts_[community];
  std::uint64_t total = 0;
  for (const auto& [token, n] : counts) {
    if (n == 0) continue;
    stored.emplace(token, n);
    total += n;
    global_[token] += n;
    doc_freq_[token] += 1;
  }
  totals_[community] = total;
  grand_total_ += total;
}

std::uint64_t FrequencyTable::count(const std::string& community, const std::string& token) const {
  auto it = counts_.find(community);
  if (it == counts_.end()) return 0;
  auto jt = it->second.find(token);
  return jt == it->second.end() ? 0 : jt->second;
}

std::uint64_t FrequencyTable::community_total(const std::string& community) const {
  auto it = totals_.find(community);
  return it == totals_.end() ? 0 : it->second;
}

std::uint64_t FrequencyTable::global_count(const std::string& token) const {
  auto it = global_.find(token);
  return it == global_.end() ? 0 : it->second;
}

std::uint64_t FrequencyTable::doc_freq(const std::string& token) const {
  auto it = doc_freq_.find(token);
  return it == doc_freq_.end() ? 0 : it->second;
}

const FrequencyTable::Counts& FrequencyTable::community_counts(const std::string& community) const {
  auto it = counts_.find(community);
  return it == counts_.end() ? kEmptyCounts : it->second;
}

std::vector<std::string> FrequencyTable::communities() const {
  std::vector<std::string> out;
  out.reserve(counts_.size());
  for (const auto& [name, _] : counts_) out.push_back(name);
  return out;
}

FrequencyTable::Counts count_users(const CorpusSlice& slice) {
  std::map<std::string, std::set<std::string>> users;
  for (const auto& comment : slice.comments) {
    for (const auto& token : comment.tokens) users[token].insert(comment.author);
  }
  FrequencyTable::Counts counts;
  for (const auto& [token, set] : users) counts.emplace(token, set.size());
  return counts;
}

FrequencyTable build_frequency_table(std::span<const CorpusSlice> slices) {
  FrequencyTable table;
  for (const auto& slice : slices) table.add_community(slice.community, count_users(slice));
  return table;
}

std::vector<std::string> top_fraction_tokens(const FrequencyTable::Counts& counts, double fraction) {
  std::vector<std::pair<std::uint64_t, std::string>> ranked;
  ranked.reserve(counts.size());
  for (const auto& [token, n] : counts) ranked.emplace_back(n, token);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ranked.size()) - 1e-9));
  std::vector<std::string> out;
  if (keep == 0) return out;
  const std::uint64_t boundary = ranked[keep - 1].first;
  for (const auto& [n, token] : ranked) {
    if (n < boundary) break;
    out.push_back(token);
  }
  return out;
}

std::vector<std::string> select_type_vocab(const FrequencyTable& table, const std::string& community,
                                           TypeVocabParams params) {
  const auto& counts = table.community_counts(community);
  std::vector<std::string> vocab;
  for (auto& token : top_fraction_tokens(counts, params.top_fraction)) {
    if (counts.at(token) >= params.min_count) vocab.push_back(std::move(token));
  }
  std::sort(vocab.begin(), vocab.end());
  return vocab;
}

PmiScore npmi_from_counts(std::uint64_t count, std::uint64_t context_total, std::uint64_t global_count,
                          std::uint64_t grand_total) {
  if (count == 0 || context_total == 0 || global_count == 0 || grand_total == 0) {
    throw UndefinedScore("PMI undefined for a zero count");
  }
  const double p_given = static_cast<double>(count) / static_cast<double>(context_total);
  const double p_marginal = static_cast<double>(global_count) / static_cast<double>(grand_total);
  const double p_joint = static_cast<double>(count) / static_cast<double>(grand_total);
  PmiScore score;
  score.pmi = std::log(p_given / p_marginal);
  const double denom = -std::log(p_joint);
  // p_joint == 1: the only item of the only context.
  score.npmi = denom > 0.0 ? score.pmi / denom : 1.0;
  return score;
}

PmiScore score_pmi_npmi(const FrequencyTable& table, const std::string& community,
                        const std::string& token) {
  const std::uint64_t f = table.count(community, token);
  if (f == 0) throw UndefinedScore("token '" + token + "' does not occur in " + community);
  return npmi_from_counts(f, table.community_total(community), table.global_count(token),
                          table.grand_total());
}

double score_tfidf(const FrequencyTable& table, const std::string& community, const std::string& token) {
  const std::uint64_t f = table.count(community, token);
  if (f == 0) throw UndefinedScore("token '" + token + "' does not occur in " + community);
  const double tf = 1.0 + std::log10(static_cast<double>(f));
  const double idf = std::log10(static_cast<double>(table.n_communities()) /
                                static_cast<double>(table.doc_freq(token)));
  return tf * idf;
}

double score_jsd(const FrequencyTable& table, const std::string& community, const std::string& token) {
  const std::uint64_t f = table.count(community, token);
  const std::uint64_t total = table.community_total(community);
  const std::uint64_t background_f = table.global_count(token) - f;
  const std::uint64_t background_total = table.grand_total() - total;
  const double p = total > 0 ? static_cast<double>(f) / static_cast<double>(total) : 0.0;
  const double q = background_total > 0
                       ? static_cast<double>(background_f) / static_cast<double>(background_total)
                       : 0.0;
  if (p == 0.0 && q == 0.0) {
    throw UndefinedScore("token '" + token + "' absent from " + community + " and its background");
  }
  const double m = 0.5 * (p + q);
  const double d = -xlog2x(m) + 0.5 * (xlog2x(p) + xlog2x(q));
  return p < q ? -d : d;
}

bool is_textrank_tag(const std::string& tag) {
  if (tag == "NOUN" || tag == "PROPN" || tag == "ADJ") return true;
  return tag.rfind("NN", 0) == 0 || tag.rfind("JJ", 0) == 0;
}

bool is_textrank_content_token(const std::string& token) {
  return !is_sentinel_token(token) && !is_punctuation_token(token) && !stopwords().count(token);
}

std::map<std::string, double> score_textrank(const CorpusSlice& slice, const PosSidecar* pos,
                                             TextRankParams params) {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> names;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  const auto node = [&](const std::string& token) {
    auto [it, inserted] = index.emplace(token, names.size());
    if (inserted) names.push_back(token);
    return it->second;
  };

  std::vector<std::size_t> sequence;
  for (const auto& comment : slice.comments) {
    sequence.clear();
    const std::vector<std::string>* tags = nullptr;
    if (pos) {
      auto it = pos->find(comment.id);
      if (it != pos->end() && it->second.size() == comment.tokens.size()) tags = &it->second;
    }
    for (std::size_t i = 0; i < comment.tokens.size(); ++i) {
      const auto& token = comment.tokens[i];
      const bool keep = tags ? (is_textrank_tag((*tags)[i]) && !is_sentinel_token(token))
                             : is_textrank_content_token(token);
      if (keep) sequence.push_back(node(token));
    }
    for (std::size_t i = 0; i < sequence.size(); ++i) {
      for (std::size_t j = i + 1; j < sequence.size() && j - i < params.window; ++j) {
        if (sequence[i] == sequence[j]) continue;
        edges.emplace(std::min(sequence[i], sequence[j]), std::max(sequence[i], sequence[j]));
      }
    }
  }

  const std::size_t n = names.size();
  std::map<std::string, double> scores;
  if (n == 0) return scores;

  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto& [a, b] : edges) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  const double nd = static_cast<double>(n);
  std::vector<double> rank(n, 1.0 / nd), next(n);
  for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (adjacency[v].empty()) dangling += rank[v];
    }
    const double base = (1.0 - params.damping) / nd + params.damping * dangling / nd;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t u = 0; u < n; ++u) {
      if (adjacency[u].empty()) continue;
      const double share = params.damping * rank[u] / static_cast<double>(adjacency[u].size());
      for (std::size_t v : adjacency[u]) next[v] += share;
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - rank[v]);
    rank.swap(next);
    if (change < params.tolerance) break;
  }
  for (std::size_t v = 0; v < n; ++v) scores.emplace(names[v], rank[v]);
  return scores;
}

void write_score_file(std::ostream& out, const std::string& metric, std::vector<ScoreRow> rows,
                      const std::string& header_comment) {
  std::sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    if (a.community != b.community) return a.community < b.community;
    return a.token < b.token;
  });
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (const auto& row : rows) {
    out << row.community << '\t' << row.token << '\t' << metric << '\t' << format_double(row.value)
        << '\n';
  }
}

std::vector<ScoreRow> read_score_file(std::istream& in, std::string* metric) {
  std::vector<ScoreRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4) {
      throw Error("score file line " + std::to_string(line_no) + ": expected 4 columns");
    }
    if (metric) *metric = fields[2];
    rows.push_back({fields[0], fields[1], std::stod(fields[3])});
  }
  return rows;
}

PosSidecar read_pos_sidecar(std::istream& in) {
  PosSidecar sidecar;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto record = nlohmann::json::parse(line);
    sidecar[record.at("id").get<std::string>()] = record.at("pos").get<std::vector<std::string>>();
  }
  return sidecar;
}

}  // namespace lexvar
