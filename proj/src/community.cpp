#include "lexvar/community.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "lexvar/util.hpp"

namespace lexvar {

UserStats compute_user_stats(std::span<const Comment> comments) {
  std::set<std::string> authors;
  for (const auto& c : comments) authors.insert(c.author);
  UserStats stats;
  stats.size = authors.size();
  stats.activity = authors.empty() ? 0.0 : static_cast<double>(comments.size()) / static_cast<double>(authors.size());
  return stats;
}

LoyaltyResult compute_loyalty(std::span<const Comment> all_comments, LoyaltyParams params) {
  std::map<std::string, std::map<std::string, std::uint64_t>> per_user;  // user -> community -> top-level count
  std::set<std::string> communities;
  for (const auto& c : all_comments) {
    communities.insert(c.community);
    if (c.is_top_level) ++per_user[c.author][c.community];
  }

  LoyaltyResult result;
  std::map<std::string, std::uint64_t> eligible;
  std::map<std::string, std::uint64_t> loyal;
  for (const auto& [user, counts] : per_user) {
    std::uint64_t total = 0;
    for (const auto& [community, n] : counts) total += n;
    if (total < params.min_top_level) continue;
    result.eligible_users.insert(user);
    for (const auto& [community, n] : counts) {
      ++eligible[community];
      if (static_cast<double>(n) >= params.loyal_share * static_cast<double>(total)) {
        ++loyal[community];
        result.loyal_to[user].push_back(community);
      }
    }
  }
  for (const auto& community : communities) {
    auto e = eligible.find(community);
    if (e == eligible.end()) {
      result.fraction[community] = std::nullopt;
    } else {
      result.fraction[community] = static_cast<double>(loyal[community]) / static_cast<double>(e->second);
    }
  }
  return result;
}

std::size_t ReplyGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& adj : adjacency) twice += adj.size();
  return twice / 2;
}

std::size_t ReplyGraph::index_of(const std::string& user) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), user);
  if (it == nodes.end() || *it != user) throw Error("user '" + user + "' is not in the graph");
  return static_cast<std::size_t>(it - nodes.begin());
}

ReplyGraph make_graph(std::vector<std::string> nodes, const std::vector<std::pair<std::string, std::string>>& edges) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  ReplyGraph graph;
  graph.nodes = std::move(nodes);
  std::vector<std::set<std::size_t>> adj(graph.nodes.size());
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    const auto a = graph.index_of(u);
    const auto b = graph.index_of(v);
    adj[a].insert(b);
    adj[b].insert(a);
  }
  graph.adjacency.resize(adj.size());
  for (std::size_t i = 0; i < adj.size(); ++i) graph.adjacency[i].assign(adj[i].begin(), adj[i].end());
  return graph;
}

std::vector<std::string> top_users(std::span<const Comment> comments, double top_fraction) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& c : comments) ++counts[c.author];
  if (counts.empty()) return {};
  std::vector<std::uint64_t> sorted;
  for (const auto& [user, n] : counts) sorted.push_back(n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  auto keep = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(sorted.size()) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, sorted.size());
  const auto threshold = sorted[keep - 1];
  std::vector<std::string> users;
  for (const auto& [user, n] : counts) {
    if (n >= threshold) users.push_back(user);
  }
  return users;
}

ReplyGraph build_reply_network(std::span<const Comment> comments, double top_fraction) {
  auto users = top_users(comments, top_fraction);
  const std::set<std::string> kept(users.begin(), users.end());
  std::unordered_map<std::string, const std::string*> author_of;
  for (const auto& c : comments) author_of.emplace(c.id, &c.author);
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& c : comments) {
    if (!kept.count(c.author)) continue;
    const auto parent = parent_comment_id(c.parent_id);
    if (!parent) continue;
    auto it = author_of.find(*parent);
    if (it == author_of.end() || !kept.count(*it->second) || *it->second == c.author) continue;
    edges.emplace_back(c.author, *it->second);
  }
  return make_graph(std::move(users), edges);
}

double network_density(const ReplyGraph& graph) {
  const auto n = static_cast<double>(graph.nodes.size());
  if (graph.nodes.size() <= 1) return 0.0;
  return 2.0 * static_cast<double>(graph.edge_count()) / (n * (n - 1.0));
}

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Unweighted single-source distances.
void bfs(const ReplyGraph& graph, std::size_t source, std::vector<std::uint32_t>& dist) {
  std::fill(dist.begin(), dist.end(), kUnreached);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : graph.adjacency[u]) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
}

std::vector<std::vector<std::size_t>> components(const ReplyGraph& graph) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<char> seen(graph.nodes.size(), 0);
  for (std::size_t s = 0; s < graph.nodes.size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> members{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (auto v : graph.adjacency[members[i]]) {
        if (!seen[v]) {
          seen[v] = 1;
          members.push_back(v);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

// Sums of BFS distances from the pivots to every node, reduced over workers
// in integer arithmetic so the result does not depend on `jobs`.
std::vector<std::uint64_t> pivot_distance_sums(const ReplyGraph& graph, const std::vector<std::size_t>& pivots,
                                               unsigned jobs) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, pivots.size()));
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(graph.nodes.size(), 0));
  parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t w) {
    std::vector<std::uint32_t> dist(graph.nodes.size());
    for (std::size_t p = w; p < pivots.size(); p += workers) {
      bfs(graph, pivots[p], dist);
      for (std::size_t v = 0; v < dist.size(); ++v) {
        if (dist[v] != kUnreached) partial[w][v] += dist[v];
      }
    }
  });
  std::vector<std::uint64_t> sums(graph.nodes.size(), 0);
  for (const auto& part : partial) {
    for (std::size_t v = 0; v < sums.size(); ++v) sums[v] += part[v];
  }
  return sums;
}

std::vector<double> closeness_impl(const ReplyGraph& graph, std::size_t max_pivots, std::uint64_t seed,
                                   unsigned jobs) {
  std::vector<double> closeness(graph.nodes.size(), 0.0);
  for (const auto& members : components(graph)) {
    const std::size_t nc = members.size();
    if (nc < 2) continue;
    std::vector<std::size_t> pivots = members;
    if (max_pivots < nc) {
      Rng rng(derive_seed(seed, members.front()));
      for (std::size_t i = 0; i < max_pivots; ++i) {
        const auto j = i + rng.uniform_index(nc - i);
        std::swap(pivots[i], pivots[j]);
      }
      pivots.resize(max_pivots);
      std::sort(pivots.begin(), pivots.end());
    }
    const auto sums = pivot_distance_sums(graph, pivots, jobs);
    const double scale = static_cast<double>(nc) / static_cast<double>(pivots.size());
    for (auto v : members) {
      const double total = scale * static_cast<double>(sums[v]);
      closeness[v] = total > 0.0 ? static_cast<double>(nc - 1) / total : 0.0;
    }
  }
  return closeness;
}

}  // namespace

std::vector<double> exact_closeness(const ReplyGraph& graph, unsigned jobs) {
  return closeness_impl(graph, std::numeric_limits<std::size_t>::max(), 0, jobs);
}

std::vector<double> approx_closeness(const ReplyGraph& graph, ClosenessParams params, std::uint64_t seed,
                                     unsigned jobs) {
  if (!(params.epsilon > 0.0)) throw Error("closeness epsilon must be positive");
  if (params.pivots == 0) throw Error("closeness needs at least one pivot");
  std::size_t k = params.pivots;
  if (graph.nodes.size() > 1) {
    const double bound = std::ceil(std::log(static_cast<double>(graph.nodes.size())) /
                                   (params.epsilon * params.epsilon));
    if (bound < static_cast<double>(k)) k = std::max<std::size_t>(1, static_cast<std::size_t>(bound));
  }
  return closeness_impl(graph, k, seed, jobs);
}

Distinctiveness distinctiveness_F(const std::vector<std::string>& vocab,
                                  const std::map<std::string, double>& type_npmi,
                                  const std::map<std::string, double>& sense_npmi, double type_cutoff,
                                  double sense_cutoff) {
  Distinctiveness d;
  d.vocab_size = vocab.size();
  if (vocab.empty()) return d;
  std::size_t either = 0, by_type = 0, by_sense = 0;
  for (const auto& token : vocab) {
    auto t = type_npmi.find(token);
    auto s = sense_npmi.find(token);
    const bool above_t = t != type_npmi.end() && t->second > type_cutoff;
    const bool above_s = s != sense_npmi.end() && s->second > sense_cutoff;
    by_type += above_t;
    by_sense += above_s;
    either += above_t || above_s;
  }
  const auto n = static_cast<double>(vocab.size());
  d.F = static_cast<double>(either) / n;
  d.type_only = static_cast<double>(by_type) / n;
  d.sense_only = static_cast<double>(by_sense) / n;
  return d;
}

double user_specific_word_prob(std::span<const Comment* const> user_comments, const std::set<std::string>& words) {
  if (user_comments.empty()) throw Error("user has no comments in the community");
  std::size_t hits = 0;
  for (const auto* c : user_comments) {
    if (std::any_of(c->tokens.begin(), c->tokens.end(), [&](const std::string& t) { return words.count(t) > 0; })) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(user_comments.size());
}

std::vector<UserUsage> user_word_usage(const std::string& community, std::span<const Comment> comments,
                                       const std::set<std::string>& words, const LoyaltyResult& loyalty) {
  std::map<std::string, std::vector<const Comment*>> by_user;
  for (const auto& c : comments) by_user[c.author].push_back(&c);
  std::vector<UserUsage> rows;
  for (const auto& [user, list] : by_user) {
    UserUsage row;
    row.community = community;
    row.user = user;
    row.comments = list.size();
    auto it = loyalty.loyal_to.find(user);
    row.loyal = it != loyalty.loyal_to.end() &&
                std::find(it->second.begin(), it->second.end(), community) != it->second.end();
    row.probability = user_specific_word_prob(list, words);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_profiles(std::ostream& out, const std::vector<CommunityProfile>& rows, const std::string& header_comment) {
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "community\tsize\tactivity\tloyalty\tdensity\tF\tF_type\tF_sense\ttopic\ttopic_flag\n";
  for (const auto& r : rows) {
    out << r.community << '\t' << r.size << '\t' << format_double(r.activity) << '\t'
        << (r.loyalty ? format_double(*r.loyalty) : std::string("NA")) << '\t' << format_double(r.density) << '\t'
        << format_double(r.F) << '\t' << format_double(r.F_type) << '\t' << format_double(r.F_sense) << '\t'
        << (r.topic.empty() ? std::string("NA") : r.topic) << '\t' << r.topic_flag << '\n';
  }
}

std::vector<CommunityProfile> read_profiles(std::istream& in) {
  std::vector<CommunityProfile> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    auto f = split(line, '\t');
    if (f.size() != 10) throw Error("profile row has " + std::to_string(f.size()) + " columns, expected 10");
    CommunityProfile p;
    p.community = f[0];
    p.size = std::stoull(f[1]);
    p.activity = std::stod(f[2]);
    if (f[3] != "NA") p.loyalty = std::stod(f[3]);
    p.density = std::stod(f[4]);
    p.F = std::stod(f[5]);
    p.F_type = std::stod(f[6]);
    p.F_sense = std::stod(f[7]);
    p.topic = f[8] == "NA" ? std::string() : f[8];
    p.topic_flag = std::stoi(f[9]);
    rows.push_back(std::move(p));
  }
  return rows;
}

std::map<std::string, std::string> read_topic_map(std::istream& in) {
  std::map<std::string, std::string> topics;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty() || line[0] == '#') continue;
    auto f = split(line, '\t');
    if (f.size() < 2) throw Error("topic map line needs community and topic: " + line);
    topics[std::string(trim(f[0]))] = std::string(trim(f[1]));
  }
  return topics;
}

}  // namespace lexvar
