#pragma once

// Monte Carlo estimates of M_n(gamma) = E max_{k<=n} |xi_k|^gamma and of the
// maximal moment index theta_gamma = limsup log M_n(gamma) / log n.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stablab/sampler.hpp"

namespace stablab {

/// {2^k_lo, ..., 2^k_hi}.
std::vector<std::uint64_t> geometric_grid(int k_lo, int k_hi);

enum class MaxMethod {
  /// Draw every xi_k and track the running maximum.
  direct,
  /// Draw the maximum of each block between grid points from its exact law
  /// (i.i.d. Pareto, i.i.d. Gaussian and constant sources only).
  block,
};

struct MomentOptions {
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  MaxMethod method = MaxMethod::direct;
};

struct MomentCurve {
  double gamma = 1.0;
  std::vector<std::uint64_t> n_grid;
  std::vector<double> m_values;
  std::vector<double> stderr_values;
  std::size_t replicates = 0;
  /// per_replicate[r][i] = max_{k <= n_i} |xi_k|^gamma for replicate r.
  std::vector<std::vector<double>> per_replicate;
};

MomentCurve moment_curve(const SequenceSpec& source, double gamma, std::vector<std::uint64_t> n_grid,
                         const MomentOptions& options = {});

struct ThetaEstimate {
  double theta_hat = 0.0;
  /// Fit window as grid values n_lo .. n_hi.
  std::uint64_t window_lo = 0;
  std::uint64_t window_hi = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double r_squared = 0.0;
};

/// Least-squares slope of log m over log n on the top half of the grid, with a
/// percentile bootstrap over replicates.
ThetaEstimate theta_estimate(const MomentCurve& curve, std::size_t resamples = 1000, std::uint64_t seed = 0);

struct GaussianMaxReport {
  std::vector<std::uint64_t> n;
  std::vector<double> mean_max;
  /// E max |xi_k| / sqrt(log n).
  std::vector<double> ratio;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool upper_ok = false;
  bool lower_ok = false;
};

/// Ratios of E max_{k<=n} |xi_k| to sqrt(log n); upper_ok when every ratio is
/// <= upper, lower_ok when every ratio is >= lower. Grid values must be >= 2.
GaussianMaxReport gaussian_max_check(const SequenceSpec& source, std::vector<std::uint64_t> n_grid,
                                     const MomentOptions& options = {}, double lower = 0.3, double upper = 2.0);

struct SandwichReport {
  std::vector<std::uint64_t> n;
  std::vector<double> m_hat;
  std::vector<double> lower_envelope;  // n^{gamma/alpha}
  std::vector<double> upper_envelope;  // n^{gamma/alpha} (log n)^{(1+eps) gamma/alpha}
  double k9 = 0.0;
  double k7 = 0.0;
  double slope = 0.0;
  /// The lower bound needs independent-type sources; false for constant and
  /// correlated sequences.
  bool lower_applicable = false;
  bool ok = false;
};

SandwichReport heavy_tail_bound_check(const SequenceSpec& source, double gamma, double alpha, double epsilon,
                                      std::vector<std::uint64_t> n_grid, const MomentOptions& options = {});

/// Empirical Orlicz norm for Psi(r) = r^p: the c solving mean((|x|/c)^p) = 1,
/// found by bisection.
double orlicz_norm(std::span<const double> samples, double p);

struct OrliczBoundReport {
  std::vector<std::uint64_t> n;
  std::vector<double> mean_max;
  double k = 0.0;      // max over n of E max / n^{1/p}
  double slope = 0.0;  // log-log slope of E max
  bool ok = false;     // slope <= 1/p + 0.05
};

OrliczBoundReport orlicz_max_check(const SequenceSpec& source, double p, std::vector<std::uint64_t> n_grid,
                                   const MomentOptions& options = {});

}  // namespace stablab
