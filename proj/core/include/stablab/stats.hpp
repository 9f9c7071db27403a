#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stablab::stats {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
/// Standard error of the mean (sample standard deviation / sqrt(n)).
double standard_error(std::span<const double> v);
/// Linear-interpolated quantile, q in [0,1]. Copies and sorts.
double quantile(std::span<const double> v, double q);
double median(std::span<const double> v);
double correlation(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS statistic against a continuous CDF.
template <class Cdf>
double ks_one_sample(std::vector<double> sample, Cdf&& cdf);

/// Hill estimator of the tail index alpha from the k largest |x|.
double hill_tail_index(std::span<const double> v, std::size_t k);

}  // namespace stablab::stats

#include <algorithm>
#include <cmath>

template <class Cdf>
double stablab::stats::ks_one_sample(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}
