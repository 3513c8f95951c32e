#include "lexvar/glossary.hpp"

#include <algorithm>
#include <istream>

#include "lexvar/text.hpp"
#include "lexvar/util.hpp"

namespace lexvar {

std::map<std::string, Glossary> load_glossaries(std::istream& in, GlossaryLoadStats* stats) {
  std::map<std::string, Glossary> out;
  GlossaryLoadStats local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    auto f = split(line, '\t');
    if (f.size() < 2) throw Error("glossary line " + std::to_string(line_no) + ": expected community and term");
    ++local.entries;
    const std::string community(trim(f[0]));
    const auto tokens = normalize_and_tokenize(f[1]);
    if (tokens.size() != 1) {
      ++local.dropped_multiword;
      continue;
    }
    auto& g = out[community];
    g.community = community;
    if (!g.terms.insert(tokens[0]).second) {
      ++local.duplicates;
      continue;
    }
    if (f.size() > 2) g.definitions[tokens[0]] = std::string(trim(f[2]));
  }
  if (stats) *stats = local;
  return out;
}

void flag_absent_terms(std::map<std::string, Glossary>& glossaries, const FrequencyTable& table) {
  for (auto& [community, g] : glossaries) {
    g.absent_from_corpus.clear();
    for (const auto& term : g.terms) {
      if (!table.has_community(community) || table.count(community, term) == 0) g.absent_from_corpus.insert(term);
    }
  }
}

ScoreMap to_score_map(const std::vector<ScoreRow>& rows) {
  ScoreMap map;
  for (const auto& r : rows) map[r.community][r.token] = r.value;
  return map;
}

std::size_t best_glossary_rank(const std::map<std::string, double>& scores, const Glossary& glossary) {
  double best = 0.0;
  bool found = false;
  for (const auto& term : glossary.terms) {
    auto it = scores.find(term);
    if (it == scores.end()) continue;
    if (!found || it->second > best) best = it->second;
    found = true;
  }
  if (!found) return 0;
  std::set<double> higher;
  for (const auto& [token, value] : scores) {
    if (value > best) higher.insert(value);
  }
  return higher.size() + 1;
}

double glossary_mrr(const ScoreMap& scores, const std::map<std::string, Glossary>& glossaries) {
  if (glossaries.empty()) throw Error("MRR needs at least one glossary");
  double sum = 0.0;
  static const std::map<std::string, double> kEmpty;
  for (const auto& [community, g] : glossaries) {
    auto it = scores.find(community);
    const auto rank = best_glossary_rank(it == scores.end() ? kEmpty : it->second, g);
    if (rank > 0) sum += 1.0 / static_cast<double>(rank);
  }
  return sum / static_cast<double>(glossaries.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty list");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

GlossaryCoverage glossary_coverage(const ScoreMap& scores, const std::map<std::string, Glossary>& glossaries,
                                   double cutoff) {
  std::vector<double> gloss, other;
  std::size_t above = 0;
  for (const auto& [community, g] : glossaries) {
    auto it = scores.find(community);
    if (it == scores.end()) continue;
    for (const auto& [token, value] : it->second) {
      if (g.terms.count(token)) {
        gloss.push_back(value);
        above += value > cutoff;
      } else {
        other.push_back(value);
      }
    }
  }
  GlossaryCoverage c;
  c.n_glossary = gloss.size();
  c.n_non_glossary = other.size();
  if (!gloss.empty()) {
    c.median_glossary = median(gloss);
    c.pct_above_cutoff = 100.0 * static_cast<double>(above) / static_cast<double>(gloss.size());
  }
  if (!other.empty()) c.median_non_glossary = median(other);
  return c;
}

std::vector<Suggestion> glossary_suggestions(const ScoreMap& scores, const std::map<std::string, Glossary>& glossaries,
                                             std::size_t per_community) {
  std::vector<Suggestion> out;
  for (const auto& [community, g] : glossaries) {
    auto it = scores.find(community);
    if (it == scores.end()) continue;
    std::vector<Suggestion> candidates;
    for (const auto& [token, value] : it->second) {
      if (!g.terms.count(token)) candidates.push_back({community, token, value});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Suggestion& a, const Suggestion& b) { return a.value > b.value; });
    if (candidates.size() > per_community) candidates.resize(per_community);
    out.insert(out.end(), candidates.begin(), candidates.end());
  }
  return out;
}

}  // namespace lexvar
