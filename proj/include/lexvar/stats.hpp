#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lexvar {

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
double percentile_cutoff(std::span<const double> values, double p = 98.0);

/// (x - mean) / population sd. Throws on constant or empty input.
std::vector<double> zscore(std::span<const double> values);

/// Average ranks (1-based), ties sharing their mean rank.
std::vector<double> midranks(std::span<const double> values);

struct UTestResult {
  double U = 0.0;  // for sample a
  double p = 1.0;  // two-sided
  bool exact = false;
};

/// Two-sided Mann-Whitney U test. Exact enumeration of all labelings when
/// |a| + |b| <= 20; otherwise the normal approximation with tie and
/// continuity corrections.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

struct Correlation {
  double pearson = 0.0;
  double spearman = 0.0;
};
Correlation correlations(std::span<const double> x, std::span<const double> y);

struct RegressionResult {
  std::vector<std::string> names;  // "(intercept)" first
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> p_values;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::size_t n = 0;
  Eigen::VectorXd residuals;
};

/// Ordinary least squares with an intercept. Throws when X (with intercept)
/// is rank deficient, naming the offending columns, or when n < columns + 1.
RegressionResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<std::string> names = {});

/// Coefficients, standard errors in parentheses, significance stars
/// (* p<0.05, ** p<0.01, *** p<0.001), R^2, adjusted R^2 and n.
void write_regression_report(std::ostream& out, const RegressionResult& result, const std::string& title = {});

}  // namespace lexvar
