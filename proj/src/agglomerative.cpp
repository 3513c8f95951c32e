#include <algorithm>
#include <limits>
#include <numeric>

#include "lexvar/clustering.hpp"
#include "lexvar/util.hpp"

namespace lexvar {
namespace {

class CondensedMatrix {
 public:
  explicit CondensedMatrix(std::size_t n) : n_(n), data_(n * (n - 1) / 2) {}

  float& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  float operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return n_ * i - i * (i + 1) / 2 + j - i - 1;
  }

  std::size_t n_;
  std::vector<float> data_;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<Merge> average_linkage(std::size_t n, const std::function<double(std::size_t, std::size_t)>& distance,
                                   std::span<const double> weights) {
  if (weights.size() != n) throw Error("average_linkage: weight count mismatch");
  std::vector<Merge> merges;
  if (n < 2) return merges;
  merges.reserve(n - 1);

  CondensedMatrix dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dist(i, j) = static_cast<float>(distance(i, j));
  }

  std::vector<double> size(weights.begin(), weights.end());
  std::vector<char> active(n, 1);
  std::vector<std::size_t> chain;
  chain.reserve(n);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t remaining = n;

  while (remaining > 1) {
    if (chain.empty()) {
      for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) {
          chain.push_back(i);
          break;
        }
      }
    }
    std::size_t a = 0;
    std::size_t b = 0;
    while (true) {
      a = chain.back();
      const std::size_t prev = chain.size() >= 2 ? chain[chain.size() - 2] : kNone;
      std::size_t best = prev;
      float best_d = prev == kNone ? std::numeric_limits<float>::infinity() : dist(a, prev);
      for (std::size_t j = 0; j < n; ++j) {
        if (!active[j] || j == a) continue;
        const float d = dist(a, j);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best == prev) {
        b = prev;
        break;
      }
      chain.push_back(best);
    }
    chain.pop_back();
    chain.pop_back();

    const std::size_t keep = std::min(a, b);
    const std::size_t drop = std::max(a, b);
    merges.push_back({a, b, static_cast<double>(dist(a, b))});
    const double wa = size[a];
    const double wb = size[b];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      dist(keep, k) = static_cast<float>((wa * dist(a, k) + wb * dist(b, k)) / (wa + wb));
    }
    size[keep] = wa + wb;
    active[drop] = 0;
    --remaining;
  }
  return merges;
}

std::vector<std::size_t> cut_max_clusters(std::size_t n, std::vector<Merge> merges, std::size_t max_clusters) {
  if (max_clusters == 0) throw Error("cut_max_clusters: max_clusters must be positive");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  if (n > max_clusters) {
    std::stable_sort(merges.begin(), merges.end(),
                     [](const Merge& x, const Merge& y) { return x.height < y.height; });
    const double threshold = merges[n - max_clusters - 1].height;
    for (const auto& m : merges) {
      if (m.height > threshold) break;
      const auto ra = find_root(parent, m.a);
      const auto rb = find_root(parent, m.b);
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = find_root(parent, i);
  relabel_by_first_appearance(labels);
  return labels;
}

}  // namespace lexvar
