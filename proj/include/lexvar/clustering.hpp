#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lexvar {

struct KMeansResult {
  Eigen::MatrixXd centroids;  // k x dim
  std::vector<std::size_t> labels;
  double rss = 0.0;
};

struct KMeansOptions {
  std::size_t n_init = 10;
  std::size_t max_iter = 300;
};

/// Euclidean k-means (Lloyd) over the rows of `points`, k-means++ seeding,
/// best of `n_init` restarts by residual sum of squares.
///
/// When `warm_start` holds k-1 centroids, one extra restart begins from them
/// plus a D^2-sampled point, which guarantees the result is no worse than the
/// warm start's RSS. Labels are renumbered by first appearance.
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::uint64_t seed,
                    KMeansOptions options = {}, const Eigen::MatrixXd* warm_start = nullptr);

std::size_t count_distinct_rows(const Eigen::MatrixXd& points);

/// Relabels so that labels appear as 0, 1, 2, ... in input order. Returns the
/// old label of each new label.
std::vector<std::size_t> relabel_by_first_appearance(std::vector<std::size_t>& labels);

struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0.0;
};

/// Average-linkage agglomerative clustering by the nearest-neighbour chain
/// algorithm, O(n^2) time and n(n-1)/2 floats of memory. `weights` are the
/// initial cluster sizes (multiplicities of deduplicated points). Merges come
/// back in the order performed; a merge (a, b) joins the clusters holding
/// points a and b.
std::vector<Merge> average_linkage(std::size_t n, const std::function<double(std::size_t, std::size_t)>& distance,
                                   std::span<const double> weights);

/// Flat clustering at the smallest dendrogram height that leaves at most
/// `max_clusters` clusters. Labels are renumbered by first appearance.
std::vector<std::size_t> cut_max_clusters(std::size_t n, std::vector<Merge> merges, std::size_t max_clusters);

}  // namespace lexvar
