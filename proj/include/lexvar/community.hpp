#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lexvar/ingest.hpp"

namespace lexvar {

struct UserStats {
  std::uint64_t size = 0;  // distinct commenters
  double activity = 0.0;   // comments per commenter
};

/// Size and activity over all (unsampled) comments of one community.
UserStats compute_user_stats(std::span<const Comment> comments);

struct LoyaltyParams {
  std::uint64_t min_top_level = 10;
  double loyal_share = 0.5;
};

struct LoyaltyResult {
  /// Loyal users / eligible users active in the community; missing when the
  /// community has no eligible user.
  std::map<std::string, std::optional<double>> fraction;
  /// Communities each eligible user is loyal to (possibly two at exactly 50%).
  std::map<std::string, std::vector<std::string>> loyal_to;
  std::set<std::string> eligible_users;
};

/// Loyalty from the top-level comments of every user across all communities.
LoyaltyResult compute_loyalty(std::span<const Comment> all_comments, LoyaltyParams params = {});

/// Simple undirected graph; nodes are sorted user names.
struct ReplyGraph {
  std::vector<std::string> nodes;
  std::vector<std::vector<std::size_t>> adjacency;  // sorted neighbour lists
  std::size_t edge_count() const;
  std::size_t index_of(const std::string& user) const;  // throws if absent
};

ReplyGraph make_graph(std::vector<std::string> nodes, const std::vector<std::pair<std::string, std::string>>& edges);

/// Users of the community ranked by comment count, cut to the top fraction
/// (ceil, ties at the boundary included). Sorted by name.
std::vector<std::string> top_users(std::span<const Comment> comments, double top_fraction);

/// Direct-reply network among the top 20% most active users: an edge when
/// one replies to a comment by the other.
ReplyGraph build_reply_network(std::span<const Comment> comments, double top_fraction = 0.2);

/// 2|E| / (|V|(|V|-1)); 0 when |V| <= 1.
double network_density(const ReplyGraph& graph);

/// Closeness (n_c - 1) / sum of distances, within each connected component
/// (n_c its size); isolated nodes get 0.
std::vector<double> exact_closeness(const ReplyGraph& graph, unsigned jobs = 1);

struct ClosenessParams {
  double epsilon = 1e-7;
  std::size_t pivots = 5000;
};

/// Pivot-sampling estimate of closeness: per component, BFS from
/// k = min(pivots, ceil(ln n / eps^2), n_c) uniformly sampled pivots, and
/// the distance sum to v estimated as n_c / k times the pivot distance sum.
/// Uses every node (and so equals exact_closeness) when n_c <= k.
std::vector<double> approx_closeness(const ReplyGraph& graph, ClosenessParams params, std::uint64_t seed,
                                     unsigned jobs = 1);

struct Distinctiveness {
  double F = 0.0;
  double type_only = 0.0;   // share above the type cutoff
  double sense_only = 0.0;  // share above the sense cutoff
  std::size_t vocab_size = 0;
};

/// Share of the community's vocabulary whose type NPMI exceeds type_cutoff or
/// whose sense NPMI exceeds sense_cutoff. Words missing a score never count
/// for that metric. An empty vocabulary gives 0.
Distinctiveness distinctiveness_F(const std::vector<std::string>& vocab,
                                  const std::map<std::string, double>& type_npmi,
                                  const std::map<std::string, double>& sense_npmi, double type_cutoff,
                                  double sense_cutoff);

/// Fraction of the comments that contain at least one of `words`. Throws on
/// an empty comment list.
double user_specific_word_prob(std::span<const Comment* const> user_comments, const std::set<std::string>& words);

struct UserUsage {
  std::string community;
  std::string user;
  std::uint64_t comments = 0;
  bool loyal = false;
  double probability = 0.0;
};

/// One row per user of the community.
std::vector<UserUsage> user_word_usage(const std::string& community, std::span<const Comment> comments,
                                       const std::set<std::string>& words, const LoyaltyResult& loyalty);

struct CommunityProfile {
  std::string community;
  std::uint64_t size = 0;
  double activity = 0.0;
  std::optional<double> loyalty;
  double density = 0.0;
  double F = 0.0;
  double F_type = 0.0;
  double F_sense = 0.0;
  std::string topic;
  int topic_flag = 0;
};

/// TSV with a column header line; missing loyalty is written as NA.
void write_profiles(std::ostream& out, const std::vector<CommunityProfile>& rows,
                    const std::string& header_comment = {});
std::vector<CommunityProfile> read_profiles(std::istream& in);

/// community -> topic, from "community\ttopic" lines.
std::map<std::string, std::string> read_topic_map(std::istream& in);

}  // namespace lexvar
