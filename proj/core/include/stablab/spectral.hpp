#pragma once

// Radial spectral densities and the scale-parameter integral
//   ||X(t)||_alpha^alpha = int |e^{i<t,x>} - 1|^alpha f(x) dx
//                        = 2^{alpha/2} int (1 - cos<t,x>)^{alpha/2} f(x) dx.

#include <cstddef>
#include <span>
#include <vector>

namespace stablab {

enum class SpectralFamily { hfsm, riesz_bessel };

const char* to_string(SpectralFamily family);

class SpectralDensity {
 public:
  /// f(x) = c |x|^{-(alpha H + N)}.
  static SpectralDensity hfsm(double alpha, double hurst, std::size_t dim, double c = 1.0);
  /// f(x) = c / (|x|^{2 gamma} (1 + |x|^2)^eta).
  static SpectralDensity riesz_bessel(double alpha, double gamma, double eta, std::size_t dim, double c = 1.0);

  SpectralFamily family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t dim() const noexcept { return dim_; }
  double hurst() const noexcept { return hurst_; }
  double gamma() const noexcept { return gamma_; }
  double eta() const noexcept { return eta_; }
  double c() const noexcept { return c_; }
  SpectralDensity with_c(double c) const;

  /// Density as a function of r = |x| > 0 (and its logarithm).
  double radial(double r) const;
  double log_radial(double r) const;
  double operator()(std::span<const double> x) const;

 private:
  SpectralDensity(SpectralFamily family, double alpha, std::size_t dim) : family_(family), alpha_(alpha), dim_(dim) {}

  SpectralFamily family_;
  double alpha_;
  std::size_t dim_;
  double hurst_ = 0.0;
  double gamma_ = 0.0;
  double eta_ = 0.0;
  double c_ = 1.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-4;
  std::size_t max_periods = 1u << 14;
};

/// int |e^{i<t,x>} - 1|^alpha f(x) dx. N = 1 directly; N >= 2 by reduction to
/// the polar angle against t with 64-node Gauss-Legendre.
double scale_integral(const SpectralDensity& sd, std::span<const double> t, const QuadratureOptions& opts = {});
/// ||X(t)||_alpha, the alpha-th root of scale_integral.
double scale_param(const SpectralDensity& sd, std::span<const double> t, const QuadratureOptions& opts = {});

/// Scale parameter of the harmonizable sheet kernel
/// prod_j (e^{i t_j x_j} - 1) |x_j|^{-(H_j + 1/alpha)} (closed product form).
double hfss_scale_param(double alpha, std::span<const double> hurst, std::span<const double> t,
                        const QuadratureOptions& opts = {});

/// c(alpha, H, N) with ||X(e_1)||_alpha = 1.
double normalize_hfsm(double alpha, double hurst, std::size_t dim, const QuadratureOptions& opts = {});

struct EnvelopeFit {
  double k11 = 0.0;
  double k12 = 1.0;
  /// Log-log slope of f(r) r^{alpha H + N} over the last decade of the grid.
  double tail_slope = 0.0;
  bool violated = false;
};

/// Smallest K11 with f(x) <= K11 |x|^{-(alpha H_target + N)} on a log-spaced
/// grid of radii in [1, 10^6].
EnvelopeFit envelope_check(const SpectralDensity& sd, double hurst_target);

/// H = (2(eta + gamma) - N)/alpha for a Riesz-Bessel density.
double pitman_exponent(const SpectralDensity& sd);
/// c for which the Riesz-Bessel ratios tend to 1: the hfsm normalization with
/// alpha H + N = 2(gamma + eta).
double pitman_normalization(double alpha, double gamma, double eta, std::size_t dim,
                            const QuadratureOptions& opts = {});
/// ||X(t)||_alpha / |t|^{pitman_exponent} for each t.
std::vector<double> pitman_ratio(const SpectralDensity& sd, const std::vector<std::vector<double>>& t_list,
                                 const QuadratureOptions& opts = {});

}  // namespace stablab
