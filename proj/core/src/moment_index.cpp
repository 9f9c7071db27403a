#include "stablab/moment_index.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stablab/csv.hpp"
#include "stablab/error.hpp"
#include "stablab/parallel.hpp"
#include "stablab/stats.hpp"

namespace stablab {

namespace {

constexpr std::uint32_t kSequenceSubstream = 3;
constexpr std::uint32_t kBootstrapSubstream = 4;

void check_grid(const std::vector<std::uint64_t>& grid) {
  detail::require(!grid.empty(), "moment_curve: n grid is empty");
  detail::require(grid.front() >= 1, "moment_curve: grid values must be >= 1");
  for (std::size_t i = 1; i < grid.size(); ++i)
    detail::require(grid[i] > grid[i - 1], "moment_curve: n grid must be strictly increasing");
}

// Maximum of m i.i.d. |xi| from one uniform.
double block_max(const SequenceSpec& s, std::uint64_t m, double u) {
  const double q = -std::expm1(std::log(u) / static_cast<double>(m));  // 1 - u^{1/m}
  if (s.kind == SequenceKind::iid_pareto) return std::pow(q, -1.0 / s.alpha);
  return std::numbers::sqrt2 * boost::math::erfc_inv(q);
}

}  // namespace

std::vector<std::uint64_t> geometric_grid(int k_lo, int k_hi) {
  detail::require(k_lo >= 0 && k_hi >= k_lo && k_hi < 63, "geometric_grid: need 0 <= k_lo <= k_hi < 63");
  std::vector<std::uint64_t> g;
  for (int k = k_lo; k <= k_hi; ++k) g.push_back(std::uint64_t{1} << k);
  return g;
}

MomentCurve moment_curve(const SequenceSpec& source, double gamma, std::vector<std::uint64_t> n_grid,
                         const MomentOptions& options) {
  validate(source);
  if (!(gamma > 0.0 && gamma <= 1.0))
    detail::fail_argument("moment_curve: gamma = " + csv::to_string(gamma) + " is outside (0, 1]");
  if (source.kind == SequenceKind::iid_pareto && !(gamma < source.alpha))
    detail::fail_argument("moment_curve: gamma = " + csv::to_string(gamma) +
                          " must be below the Pareto index so that E|xi|^gamma is finite");
  check_grid(n_grid);
  detail::require(options.replicates >= 2, "moment_curve: at least two replicates are required");
  const bool block = options.method == MaxMethod::block;
  if (block && source.kind == SequenceKind::gaussian_correlated)
    detail::fail_argument("moment_curve: block sampling needs an i.i.d. or constant source");

  MomentCurve curve;
  curve.gamma = gamma;
  curve.n_grid = n_grid;
  curve.replicates = options.replicates;
  curve.per_replicate.assign(options.replicates, std::vector<double>(n_grid.size()));
  parallel_for(options.replicates, options.workers, [&](std::size_t r) {
    RngStream stream(options.seed, r, kSequenceSubstream);
    auto& row = curve.per_replicate[r];
    double running = 0.0;
    if (block && source.kind != SequenceKind::constant) {
      std::uint64_t done = 0;
      for (std::size_t i = 0; i < n_grid.size(); ++i) {
        running = std::max(running, block_max(source, n_grid[i] - done, stream.uniform()));
        done = n_grid[i];
        row[i] = std::pow(running, gamma);
      }
      return;
    }
    SequenceGenerator gen(source, stream);
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      for (; k < n_grid[i]; ++k) running = std::max(running, std::abs(gen.next()));
      row[i] = std::pow(running, gamma);
    }
  });
  std::vector<double> column(options.replicates);
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    for (std::size_t r = 0; r < options.replicates; ++r) column[r] = curve.per_replicate[r][i];
    curve.m_values.push_back(stats::mean(column));
    curve.stderr_values.push_back(stats::standard_error(column));
  }
  return curve;
}

namespace {

double window_slope(const std::vector<double>& log_n, const std::vector<double>& m, double* r2 = nullptr) {
  std::vector<double> y;
  y.reserve(m.size());
  for (double v : m) {
    if (!(v > 0.0)) throw RuntimeError("theta_estimate: nonpositive moment estimate; the fit is degenerate");
    y.push_back(std::log(v));
  }
  const auto fit = stats::least_squares(log_n, y);
  if (r2) *r2 = fit.r_squared;
  return fit.slope;
}

}  // namespace

ThetaEstimate theta_estimate(const MomentCurve& curve, std::size_t resamples, std::uint64_t seed) {
  const std::size_t g = curve.n_grid.size();
  detail::require(g >= 4, "theta_estimate: at least four grid points are required");
  detail::require(curve.m_values.size() == g, "theta_estimate: malformed curve");
  const std::size_t lo = g / 2;
  std::vector<double> log_n;
  for (std::size_t i = lo; i < g; ++i) log_n.push_back(std::log(static_cast<double>(curve.n_grid[i])));
  if (log_n.front() == log_n.back()) detail::fail_argument("theta_estimate: degenerate grid");
  ThetaEstimate est;
  est.window_lo = curve.n_grid[lo];
  est.window_hi = curve.n_grid[g - 1];
  est.theta_hat =
      window_slope(log_n, std::vector<double>(curve.m_values.begin() + static_cast<std::ptrdiff_t>(lo),
                                              curve.m_values.end()),
                   &est.r_squared);
  const std::size_t reps = curve.per_replicate.size();
  if (resamples == 0 || reps < 2) {
    est.ci_lo = est.ci_hi = est.theta_hat;
    return est;
  }
  RngStream stream(seed, 0, kBootstrapSubstream);
  std::vector<double> slopes;
  slopes.reserve(resamples);
  std::vector<double> m(g - lo);
  for (std::size_t b = 0; b < resamples; ++b) {
    std::fill(m.begin(), m.end(), 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
      const auto pick = static_cast<std::size_t>(stream.uniform() * static_cast<double>(reps));
      const auto& row = curve.per_replicate[std::min(pick, reps - 1)];
      for (std::size_t i = lo; i < g; ++i) m[i - lo] += row[i];
    }
    for (auto& v : m) v /= static_cast<double>(reps);
    slopes.push_back(window_slope(log_n, m));
  }
  est.ci_lo = stats::quantile(slopes, 0.025);
  est.ci_hi = stats::quantile(slopes, 0.975);
  return est;
}

GaussianMaxReport gaussian_max_check(const SequenceSpec& source, std::vector<std::uint64_t> n_grid,
                                     const MomentOptions& options, double lower, double upper) {
  if (source.kind == SequenceKind::iid_pareto)
    detail::fail_argument("gaussian_max_check: the source is not Gaussian");
  for (auto n : n_grid) detail::require(n >= 2, "gaussian_max_check: grid values must be >= 2");
  const MomentCurve curve = moment_curve(source, 1.0, n_grid, options);
  GaussianMaxReport rep;
  rep.n = curve.n_grid;
  rep.mean_max = curve.m_values;
  for (std::size_t i = 0; i < rep.n.size(); ++i)
    rep.ratio.push_back(rep.mean_max[i] / std::sqrt(std::log(static_cast<double>(rep.n[i]))));
  rep.min_ratio = *std::min_element(rep.ratio.begin(), rep.ratio.end());
  rep.max_ratio = *std::max_element(rep.ratio.begin(), rep.ratio.end());
  rep.upper_ok = rep.max_ratio <= upper;
  rep.lower_ok = rep.min_ratio >= lower;
  return rep;
}

SandwichReport heavy_tail_bound_check(const SequenceSpec& source, double gamma, double alpha, double epsilon,
                                      std::vector<std::uint64_t> n_grid, const MomentOptions& options) {
  if (!(alpha > 0.0)) detail::fail_argument("heavy_tail_bound_check: alpha must be positive");
  if (!(gamma > 0.0 && gamma < alpha))
    detail::fail_argument("heavy_tail_bound_check: gamma = " + csv::to_string(gamma) +
                          " must lie in (0, alpha) so that E|xi|^gamma is finite");
  if (!(epsilon > 0.0)) detail::fail_argument("heavy_tail_bound_check: epsilon must be positive");
  for (auto n : n_grid) detail::require(n >= 2, "heavy_tail_bound_check: grid values must be >= 2");
  const MomentCurve curve = moment_curve(source, gamma, n_grid, options);
  SandwichReport rep;
  rep.n = curve.n_grid;
  rep.m_hat = curve.m_values;
  rep.lower_applicable = source.kind == SequenceKind::iid_pareto;
  const double e = gamma / alpha;
  rep.k9 = std::numeric_limits<double>::infinity();
  rep.k7 = 0.0;
  std::vector<double> log_n, log_m;
  for (std::size_t i = 0; i < rep.n.size(); ++i) {
    const double n = static_cast<double>(rep.n[i]);
    rep.lower_envelope.push_back(std::pow(n, e));
    rep.upper_envelope.push_back(std::pow(n, e) * std::pow(std::log(n), (1.0 + epsilon) * e));
    rep.k9 = std::min(rep.k9, rep.m_hat[i] / rep.lower_envelope.back());
    rep.k7 = std::max(rep.k7, rep.m_hat[i] / rep.upper_envelope.back());
    log_n.push_back(std::log(n));
    log_m.push_back(std::log(rep.m_hat[i]));
  }
  rep.slope = log_n.size() >= 2 ? stats::least_squares(log_n, log_m).slope : 0.0;
  if (!rep.lower_applicable) rep.k9 = 0.0;
  rep.ok = std::isfinite(rep.k7) && rep.k7 > 0.0 && (!rep.lower_applicable || (std::isfinite(rep.k9) && rep.k9 > 0.0));
  return rep;
}

double orlicz_norm(std::span<const double> samples, double p) {
  detail::require(!samples.empty(), "orlicz_norm: empty sample");
  if (!(p >= 1.0)) detail::fail_argument("orlicz_norm: shape exponent p must be >= 1");
  double scale = 0.0;
  for (double v : samples) scale = std::max(scale, std::abs(v));
  if (!std::isfinite(scale)) throw RuntimeError("orlicz_norm: empirical Psi-mean is infinite");
  if (scale == 0.0) return 0.0;
  auto psi_mean = [&](double c) {
    double s = 0.0;
    for (double v : samples) s += std::pow(std::abs(v) / c, p);
    return s / static_cast<double>(samples.size());
  };
  // psi_mean is decreasing in c; max|x| * n^{1/p} bounds the root from above.
  double lo = 0.0;
  double hi = scale * std::pow(static_cast<double>(samples.size()), 1.0 / p) * 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == 0.0 || psi_mean(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

OrliczBoundReport orlicz_max_check(const SequenceSpec& source, double p, std::vector<std::uint64_t> n_grid,
                                   const MomentOptions& options) {
  if (!(p >= 1.0)) detail::fail_argument("orlicz_max_check: p must be >= 1");
  if (source.kind == SequenceKind::iid_pareto && !(p < source.alpha))
    detail::fail_argument("orlicz_max_check: p must be below the Pareto index for a finite p-th moment");
  const MomentCurve curve = moment_curve(source, 1.0, n_grid, options);
  OrliczBoundReport rep;
  rep.n = curve.n_grid;
  rep.mean_max = curve.m_values;
  std::vector<double> log_n, log_m;
  for (std::size_t i = 0; i < rep.n.size(); ++i) {
    const double n = static_cast<double>(rep.n[i]);
    rep.k = std::max(rep.k, rep.mean_max[i] / std::pow(n, 1.0 / p));
    log_n.push_back(std::log(n));
    log_m.push_back(std::log(rep.mean_max[i]));
  }
  rep.slope = log_n.size() >= 2 ? stats::least_squares(log_n, log_m).slope : 0.0;
  rep.ok = rep.slope <= 1.0 / p + 0.05;
  return rep;
}

}  // namespace stablab
