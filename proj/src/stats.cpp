#include "lexvar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "lexvar/util.hpp"

namespace lexvar {

double percentile_cutoff(std::span<const double> values, double p) {
  if (values.empty()) throw Error("percentile of an empty list");
  if (!(p > 0.0 && p <= 100.0)) throw Error("percentile must be in (0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Guard the rank against p/100 * n landing a hair above an integer.
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<double> zscore(std::span<const double> values) {
  if (values.empty()) throw Error("z-score of an empty list");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (sd == 0.0) throw Error("z-score of a constant list");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - mean) / sd);
  return out;
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("U test needs two non-empty samples");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);

  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];
  UTestResult result;
  result.U = rank_sum_a - static_cast<double>(na * (na + 1)) / 2.0;
  const double mu = static_cast<double>(na * nb) / 2.0;

  if (n <= 20) {
    // Midranks are multiples of 1/2, so doubled ranks are exact integers.
    // count[k][s]: labelings placing k items in sample a with doubled rank sum s.
    std::vector<int> doubled(n);
    for (std::size_t i = 0; i < n; ++i) doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
    const int max_sum = std::accumulate(doubled.begin(), doubled.end(), 0);
    std::vector<std::vector<std::uint64_t>> count(na + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
    count[0][0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = std::min(i + 1, na); k >= 1; --k) {
        for (int s = max_sum; s >= doubled[i]; --s) count[k][s] += count[k - 1][s - doubled[i]];
      }
    }
    // |2U - 2mu| with 2U = doubled rank sum - na(na+1).
    const long offset = static_cast<long>(na * (na + 1));
    const long two_mu = static_cast<long>(na * nb);
    const long observed = std::labs(std::lround(2.0 * rank_sum_a) - offset - two_mu);
    std::uint64_t extreme = 0, total = 0;
    for (int s = 0; s <= max_sum; ++s) {
      if (count[na][s] == 0) continue;
      total += count[na][s];
      if (std::labs(s - offset - two_mu) >= observed) extreme += count[na][s];
    }
    result.p = static_cast<double>(extreme) / static_cast<double>(total);
    result.exact = true;
    return result;
  }

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double nd = static_cast<double>(n);
  const double var = static_cast<double>(na * nb) / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
  if (var <= 0.0) {
    result.p = 1.0;
    return result;
  }
  const double z = std::max(0.0, std::fabs(result.U - mu) - 0.5) / std::sqrt(var);
  result.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return result;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("correlation inputs differ in length");
  if (x.size() < 2) throw Error("correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("correlation of a constant variable");
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  return pearson(rx, ry);
}

Correlation correlations(std::span<const double> x, std::span<const double> y) {
  return {pearson(x, y), spearman(x, y)};
}

RegressionResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> names) {
  const auto n = X.rows();
  const auto p = X.cols() + 1;
  if (y.size() != n) throw Error("OLS: X and y differ in length");
  if (names.empty()) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<Eigen::Index>(names.size()) != X.cols()) throw Error("OLS: one name per feature column required");
  names.insert(names.begin(), "(intercept)");
  if (n < p + 1) throw Error("OLS: need at least " + std::to_string(p + 1) + " observations");

  Eigen::MatrixXd design(n, p);
  design.col(0).setOnes();
  design.rightCols(X.cols()) = X;

  // Columns that add no rank over their predecessors are collinear.
  std::vector<std::string> collinear;
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.leftCols(j + 1));
    qr.setThreshold(1e-10);
    if (qr.rank() == rank) {
      collinear.push_back(names[static_cast<std::size_t>(j)]);
    } else {
      rank = qr.rank();
    }
  }
  if (!collinear.empty()) {
    std::string msg = "OLS: design matrix is rank deficient; collinear columns:";
    for (const auto& c : collinear) msg += " " + c;
    throw Error(msg);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::VectorXd beta = qr.solve(y);
  RegressionResult result;
  result.names = std::move(names);
  result.n = static_cast<std::size_t>(n);
  result.residuals = y - design * beta;
  const double rss = result.residuals.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  const auto df = static_cast<double>(n - p);
  result.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  result.adj_r2 = 1.0 - (1.0 - result.r2) * static_cast<double>(n - 1) / df;

  const double sigma2 = rss / df;
  const Eigen::MatrixXd cov = sigma2 * (design.transpose() * design).inverse();
  boost::math::students_t dist(df);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double b = beta[j];
    const double se = std::sqrt(std::max(0.0, cov(j, j)));
    result.coefficients.push_back(b);
    result.std_errors.push_back(se);
    if (se == 0.0) {
      result.p_values.push_back(b == 0.0 ? 1.0 : 0.0);
    } else {
      result.p_values.push_back(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(b / se))));
    }
  }
  return result;
}

void write_regression_report(std::ostream& out, const RegressionResult& r, const std::string& title) {
  if (!title.empty()) out << title << '\n';
  const auto stars = [](double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
  };
  std::size_t width = 12;
  for (const auto& name : r.names) width = std::max(width, name.size() + 2);
  std::ostringstream body;
  body << std::fixed << std::setprecision(4);
  for (std::size_t j = 0; j < r.names.size(); ++j) {
    body << std::left << std::setw(static_cast<int>(width)) << r.names[j] << std::right << std::setw(10)
         << r.coefficients[j] << stars(r.p_values[j]) << '\n';
    body << std::setw(static_cast<int>(width)) << "" << std::setw(10) << "(" << r.std_errors[j] << ")" << '\n';
  }
  body << std::left << std::setw(static_cast<int>(width)) << "R^2" << r.r2 << '\n';
  body << std::setw(static_cast<int>(width)) << "Adj. R^2" << r.adj_r2 << '\n';
  body << std::setw(static_cast<int>(width)) << "n" << r.n << '\n';
  out << body.str();
}

}  // namespace lexvar
