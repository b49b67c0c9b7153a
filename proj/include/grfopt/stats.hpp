#pragma once

#include <cstddef>
#include <vector>

namespace grfopt::stats {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // unbiased (M - 1) normalization
  double se = 0.0;  // sd / sqrt(M)
};

Summary summarize(const std::vector<double>& values);

double median(std::vector<double> values);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution evaluated at (sqrt(m) + 0.12 + 0.11 / sqrt(m)) D,
/// m = n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double x);

}  // namespace grfopt::stats
