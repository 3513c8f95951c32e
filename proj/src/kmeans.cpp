#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "lexvar/clustering.hpp"
#include "lexvar/util.hpp"

namespace lexvar {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double squared_distance(const MatrixXd& points, std::size_t i, const MatrixXd& centroids, std::size_t j) {
  return (points.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(j))).squaredNorm();
}

// Appends one D^2-sampled point to `centroids` given current min distances.
void add_d2_center(const MatrixXd& points, MatrixXd& centroids, std::size_t filled, VectorXd& min_dist,
                   Rng& rng) {
  const double total = min_dist.sum();
  std::size_t chosen = 0;
  if (total > 0.0) {
    const double target = rng.uniform01() * total;
    double acc = 0.0;
    chosen = static_cast<std::size_t>(points.rows()) - 1;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      acc += min_dist[i];
      if (acc > target && min_dist[i] > 0.0) {
        chosen = static_cast<std::size_t>(i);
        break;
      }
    }
  } else {
    chosen = rng.uniform_index(static_cast<std::uint64_t>(points.rows()));
  }
  centroids.row(static_cast<Eigen::Index>(filled)) = points.row(static_cast<Eigen::Index>(chosen));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    min_dist[i] = std::min(min_dist[i], squared_distance(points, static_cast<std::size_t>(i), centroids, filled));
  }
}

MatrixXd kmeanspp_init(const MatrixXd& points, std::size_t k, Rng& rng) {
  MatrixXd centroids(static_cast<Eigen::Index>(k), points.cols());
  const auto first = rng.uniform_index(static_cast<std::uint64_t>(points.rows()));
  centroids.row(0) = points.row(static_cast<Eigen::Index>(first));
  VectorXd min_dist(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    min_dist[i] = squared_distance(points, static_cast<std::size_t>(i), centroids, 0);
  }
  for (std::size_t c = 1; c < k; ++c) add_d2_center(points, centroids, c, min_dist, rng);
  return centroids;
}

MatrixXd extend_warm_start(const MatrixXd& points, const MatrixXd& warm, Rng& rng) {
  const auto k = static_cast<std::size_t>(warm.rows()) + 1;
  MatrixXd centroids(static_cast<Eigen::Index>(k), points.cols());
  centroids.topRows(warm.rows()) = warm;
  VectorXd min_dist(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c + 1 < k; ++c) {
      best = std::min(best, squared_distance(points, static_cast<std::size_t>(i), centroids, c));
    }
    min_dist[i] = best;
  }
  add_d2_center(points, centroids, k - 1, min_dist, rng);
  return centroids;
}

KMeansResult lloyd(const MatrixXd& points, MatrixXd centroids, std::size_t max_iter) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto k = static_cast<std::size_t>(centroids.rows());
  std::vector<std::size_t> labels(n, k);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    const MatrixXd cross = points * centroids.transpose();
    const VectorXd csq = centroids.rowwise().squaredNorm();
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = csq[static_cast<Eigen::Index>(j)] -
                         2.0 * cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }

    std::vector<std::size_t> counts(k, 0);
    for (auto l : labels) ++counts[l];
    // Empty clusters take the point farthest from its centroid.
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;
        const double d = squared_distance(points, i, centroids, labels[i]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) break;
      --counts[labels[far]];
      labels[far] = j;
      counts[j] = 1;
      changed = true;
    }

    MatrixXd sums = MatrixXd::Zero(static_cast<Eigen::Index>(k), points.cols());
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(labels[i])) += points.row(static_cast<Eigen::Index>(i));
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        centroids.row(static_cast<Eigen::Index>(j)) =
            sums.row(static_cast<Eigen::Index>(j)) / static_cast<double>(counts[j]);
      }
    }
    if (!changed) break;
  }

  KMeansResult result;
  result.labels = std::move(labels);
  result.centroids = std::move(centroids);
  result.rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) result.rss += squared_distance(points, i, result.centroids, result.labels[i]);
  return result;
}

}  // namespace

std::vector<std::size_t> relabel_by_first_appearance(std::vector<std::size_t>& labels) {
  std::map<std::size_t, std::size_t> mapping;
  std::vector<std::size_t> old_of_new;
  for (auto& l : labels) {
    auto [it, inserted] = mapping.emplace(l, old_of_new.size());
    if (inserted) old_of_new.push_back(l);
    l = it->second;
  }
  return old_of_new;
}

KMeansResult kmeans(const MatrixXd& points, std::size_t k, std::uint64_t seed, KMeansOptions options,
                    const MatrixXd* warm_start) {
  if (points.rows() == 0) throw Error("kmeans: no points");
  if (k == 0 || k > static_cast<std::size_t>(points.rows())) throw Error("kmeans: invalid k");

  KMeansResult best;
  bool have_best = false;
  const auto consider = [&](KMeansResult candidate) {
    if (!have_best || candidate.rss < best.rss) {
      best = std::move(candidate);
      have_best = true;
    }
  };

  if (warm_start && static_cast<std::size_t>(warm_start->rows()) + 1 == k) {
    Rng rng(derive_seed(seed, 0xa11ceULL));
    consider(lloyd(points, extend_warm_start(points, *warm_start, rng), options.max_iter));
  }
  const std::size_t restarts = k == 1 ? 1 : std::max<std::size_t>(1, options.n_init);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, r + 1));
    consider(lloyd(points, kmeanspp_init(points, k, rng), options.max_iter));
  }

  // Canonical label order; clusters that ended empty keep trailing slots.
  const auto old_of_new = relabel_by_first_appearance(best.labels);
  MatrixXd ordered(best.centroids.rows(), best.centroids.cols());
  std::vector<bool> used(static_cast<std::size_t>(best.centroids.rows()), false);
  Eigen::Index row = 0;
  for (auto old : old_of_new) {
    ordered.row(row++) = best.centroids.row(static_cast<Eigen::Index>(old));
    used[old] = true;
  }
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (!used[j]) ordered.row(row++) = best.centroids.row(static_cast<Eigen::Index>(j));
  }
  best.centroids = std::move(ordered);
  return best;
}

std::size_t count_distinct_rows(const MatrixXd& points) {
  std::vector<std::size_t> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), 0);
  const auto row_less = [&](std::size_t a, std::size_t b) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      const double x = points(static_cast<Eigen::Index>(a), c);
      const double y = points(static_cast<Eigen::Index>(b), c);
      if (x != y) return x < y;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (row_less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

}  // namespace lexvar
