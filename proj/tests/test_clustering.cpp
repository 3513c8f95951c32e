#include <set>

#include "doctest.h"
#include "lexvar/clustering.hpp"
#include "lexvar/util.hpp"

using namespace lexvar;

TEST_CASE("k-means separates two groups") {
  Eigen::MatrixXd pts(6, 2);
  pts << 0, 0, 0, 1, 1, 0, 10, 10, 10, 11, 11, 10;
  const auto r = kmeans(pts, 2, 1);
  CHECK(r.labels[0] == r.labels[1]);
  CHECK(r.labels[1] == r.labels[2]);
  CHECK(r.labels[3] == r.labels[4]);
  CHECK(r.labels[0] != r.labels[3]);
  CHECK(r.labels[0] == 0);  // first appearance
  // Each group has centroid offset (1/3, 1/3) and RSS 4/3.
  CHECK(r.rss == doctest::Approx(8.0 / 3.0));
}

TEST_CASE("k-means is reproducible under a seed") {
  Rng rng(5);
  Eigen::MatrixXd pts(50, 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) pts(i, j) = rng.normal();
  }
  const auto a = kmeans(pts, 4, 11);
  const auto b = kmeans(pts, 4, 11);
  CHECK(a.labels == b.labels);
  CHECK(a.rss == b.rss);
}

TEST_CASE("warm start never increases RSS") {
  Rng rng(8);
  Eigen::MatrixXd pts(40, 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    pts(i, 0) = rng.normal();
    pts(i, 1) = rng.normal();
  }
  const auto k2 = kmeans(pts, 2, 1);
  KMeansOptions one;
  one.n_init = 1;
  const auto k3 = kmeans(pts, 3, 2, one, &k2.centroids);
  CHECK(k3.rss <= k2.rss + 1e-12);
}

TEST_CASE("distinct rows and relabeling") {
  Eigen::MatrixXd pts(4, 1);
  pts << 1, 1, 2, 1;
  CHECK(count_distinct_rows(pts) == 2);
  std::vector<std::size_t> labels{5, 5, 2, 9};
  const auto old = relabel_by_first_appearance(labels);
  CHECK(labels == std::vector<std::size_t>{0, 0, 1, 2});
  CHECK(old == std::vector<std::size_t>{5, 2, 9});
}

TEST_CASE("average linkage on a line") {
  // Points 0, 1, 5, 6, 20: merges at 1, 1, then (0,1)-(5,6) at 5, then 20 at 17.
  const std::vector<double> x{0, 1, 5, 6, 20};
  const std::vector<double> w(5, 1.0);
  auto merges = average_linkage(5, [&](std::size_t a, std::size_t b) { return std::abs(x[a] - x[b]); }, w);
  REQUIRE(merges.size() == 4);
  std::multiset<double> heights;
  for (const auto& m : merges) heights.insert(m.height);
  const double expected[] = {1.0, 1.0, 5.0, 17.0};
  std::size_t i = 0;
  for (double h : heights) CHECK(h == doctest::Approx(expected[i++]).epsilon(1e-6));
  CHECK(cut_max_clusters(5, merges, 3) == std::vector<std::size_t>{0, 0, 1, 1, 2});
  CHECK(cut_max_clusters(5, merges, 2) == std::vector<std::size_t>{0, 0, 0, 0, 1});
  CHECK(cut_max_clusters(5, merges, 5) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(cut_max_clusters(5, merges, 1) == std::vector<std::size_t>{0, 0, 0, 0, 0});
}

TEST_CASE("average linkage honours weights") {
  // Point 0 stands for 3 copies: d({0,1}, 2) = (3*4 + 1*2) / 4 = 3.5.
  const std::vector<double> x{0, 2, 4};
  const std::vector<double> w{3, 1, 1};
  const auto merges = average_linkage(3, [&](std::size_t a, std::size_t b) { return std::abs(x[a] - x[b]); }, w);
  REQUIRE(merges.size() == 2);
  CHECK(merges[1].height == doctest::Approx(3.5).epsilon(1e-6));
}
