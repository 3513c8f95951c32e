#include "lexvar/semantic.hpp"

#include <istream>
#include <ostream>

#include "lexvar/util.hpp"

namespace lexvar {

void SenseFrequencyTable::add(const std::string& community, const SenseKey& key, const std::string& user) {
  if (!users_[community][key].insert(user).second) return;
  ++totals_[community];
  ++global_[key];
  ++grand_total_;
}

std::uint64_t SenseFrequencyTable::count(const std::string& community, const SenseKey& key) const {
  auto c = users_.find(community);
  if (c == users_.end()) return 0;
  auto k = c->second.find(key);
  return k == c->second.end() ? 0 : k->second.size();
}

std::uint64_t SenseFrequencyTable::community_total(const std::string& community) const {
  auto it = totals_.find(community);
  return it == totals_.end() ? 0 : it->second;
}

std::uint64_t SenseFrequencyTable::global_count(const SenseKey& key) const {
  auto it = global_.find(key);
  return it == global_.end() ? 0 : it->second;
}

std::vector<std::string> SenseFrequencyTable::communities() const {
  std::vector<std::string> out;
  for (const auto& [community, cells] : users_) out.push_back(community);
  return out;
}

std::map<SenseId, std::uint64_t> SenseFrequencyTable::senses_of(const std::string& community,
                                                                const std::string& token) const {
  std::map<SenseId, std::uint64_t> out;
  auto c = users_.find(community);
  if (c == users_.end()) return out;
  for (auto it = c->second.lower_bound(SenseKey{token, 0}); it != c->second.end() && it->first.token == token; ++it) {
    out.emplace(it->first.sense, it->second.size());
  }
  return out;
}

std::vector<std::string> SenseFrequencyTable::tokens_in(const std::string& community) const {
  std::vector<std::string> out;
  auto c = users_.find(community);
  if (c == users_.end()) return out;
  for (const auto& [key, users] : c->second) {
    if (out.empty() || out.back() != key.token) out.push_back(key.token);
  }
  return out;
}

SenseFrequencyTable count_sense_users(std::span<const SenseAssignment> assignments) {
  SenseFrequencyTable table;
  for (const auto& a : assignments) {
    if (a.occurrence.user.empty()) {
      throw Error("assignment for " + occurrence_key_string(a.occurrence) + " has no user");
    }
    table.add(a.occurrence.community, SenseKey{a.occurrence.token, a.sense}, a.occurrence.user);
  }
  return table;
}

PmiScore sense_npmi(const SenseFrequencyTable& table, const std::string& community, const SenseKey& key) {
  const auto count = table.count(community, key);
  if (count == 0) {
    throw UndefinedScore("sense " + std::to_string(key.sense) + " of '" + key.token + "' does not occur in " +
                         community);
  }
  return npmi_from_counts(count, table.community_total(community), table.global_count(key), table.grand_total());
}

SenseScore word_sense_specificity(const SenseFrequencyTable& table, const std::string& community,
                                  const std::string& token, const std::string& method) {
  const auto senses = table.senses_of(community, token);
  if (senses.empty()) throw UndefinedScore("'" + token + "' has no assigned occurrence in " + community);
  SenseId best = senses.begin()->first;
  std::uint64_t best_users = 0;
  std::uint64_t best_global = 0;
  for (const auto& [sense, users] : senses) {
    const auto global = table.global_count(SenseKey{token, sense});
    if (users > best_users || (users == best_users && global > best_global)) {
      best = sense;
      best_users = users;
      best_global = global;
    }
  }
  SenseScore score;
  score.community = community;
  score.token = token;
  score.method = method;
  score.dominant_sense = best;
  score.value = sense_npmi(table, community, SenseKey{token, best}).npmi;
  return score;
}

std::vector<SenseScore> score_all_words(const SenseFrequencyTable& table, const std::string& method) {
  std::vector<SenseScore> rows;
  for (const auto& community : table.communities()) {
    for (const auto& token : table.tokens_in(community)) {
      rows.push_back(word_sense_specificity(table, community, token, method));
    }
  }
  return rows;
}

void write_sense_scores(std::ostream& out, const std::vector<SenseScore>& rows, const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (const auto& r : rows) {
    out << r.community << '\t' << r.token << '\t' << r.method << '\t' << r.dominant_sense << '\t'
        << format_double(r.value) << '\n';
  }
}

std::vector<SenseScore> read_sense_scores(std::istream& in) {
  std::vector<SenseScore> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = split(line, '\t');
    if (f.size() != 5) throw Error("sense score line " + std::to_string(line_no) + ": expected 5 columns");
    rows.push_back({f[0], f[1], f[2], static_cast<SenseId>(std::stoul(f[3])), std::stod(f[4])});
  }
  return rows;
}

}  // namespace lexvar
