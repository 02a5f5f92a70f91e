#pragma once

#include <cstdint>
#include <vector>

namespace puw::stats {

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased (n-1)
double stddev(const std::vector<double>& v);
double coefficient_of_variation(const std::vector<double>& v);
double stderr_of_mean(const std::vector<double>& v);

// q in [0,1]; linear interpolation between order statistics.
double quantile(std::vector<double> v, double q);

struct KsResult {
  double statistic = 0;  // sup |F_n - F|
  double p_value = 1;    // Stephens-corrected asymptotic series
  std::uint64_t n = 0;
};

// One-sample KS against an exponential CDF with the *sample* mean.
KsResult ks_exponential_fit(const std::vector<double>& sample);

struct SpearmanResult {
  double rho = 0;
  double p_one_sided = 1;  // P(rho_perm >= rho_observed); exact for n <= 8
  std::uint64_t n = 0;
};

// Average ranks for ties; exact permutation p for n <= 8, t-approximation above.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

struct LinFit {
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;
  double r2 = 0;
};

LinFit ols(const std::vector<double>& x, const std::vector<double>& y);

// OLS of log(y) on log(x); all values must be positive.
LinFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace puw::stats
