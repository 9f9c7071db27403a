#include "stablab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stablab/error.hpp"

namespace stablab::stats {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size(), "least_squares: length mismatch");
  detail::require(x.size() >= 2, "least_squares: at least two points are required");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  detail::require(sxx > 0.0, "least_squares: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double mean(std::span<const double> v) {
  detail::require(!v.empty(), "mean: empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double quantile(std::span<const double> v, double q) {
  detail::require(!v.empty(), "quantile: empty sample");
  detail::require(q >= 0.0 && q <= 1.0, "quantile: q must lie in [0,1]");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

double median(std::span<const double> v) { return quantile(v, 0.5); }

double correlation(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "correlation: need two equal-length samples");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  detail::require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double hill_tail_index(std::span<const double> v, std::size_t k) {
  detail::require(k >= 1 && k < v.size(), "hill_tail_index: need 1 <= k < n");
  std::vector<double> a(v.size());
  std::transform(v.begin(), v.end(), a.begin(), [](double x) { return std::abs(x); });
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end(), std::greater<>());
  const double threshold = a[k];
  detail::require(threshold > 0.0, "hill_tail_index: threshold order statistic is zero");
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(a[i] / threshold);
  return static_cast<double>(k) / s;
}

}  // namespace stablab::stats
