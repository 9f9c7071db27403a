#include "stablab/spectral.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stablab/csv.hpp"
#include "stablab/error.hpp"
#include "stablab/stats.hpp"

namespace stablab {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    detail::fail_argument("spectral density: alpha = " + csv::to_string(alpha) +
                          " is outside the admissible interval (0, 2)");
}

double sphere_area(std::size_t n) {
  const double h = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

const GaussLegendre& gauss_legendre_64() {
  static const GaussLegendre rule = [] {
    constexpr int n = 64;
    GaussLegendre r;
    for (double x : boost::math::legendre_p_zeros<double>(n)) {
      const double dp = boost::math::legendre_p_prime(n, x);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      r.nodes.push_back(x);
      r.weights.push_back(w);
      r.nodes.push_back(-x);
      r.weights.push_back(w);
    }
    return r;
  }();
  return rule;
}

// Mean of 2^alpha |sin(u/2)|^alpha over one period.
double periodic_mean(double alpha) {
  return std::pow(2.0, alpha) * std::tgamma((alpha + 1.0) / 2.0) /
         (std::sqrt(std::numbers::pi) * std::tgamma(alpha / 2.0 + 1.0));
}

// int_0^inf |e^{i a r} - 1|^alpha f(r) r^{N-1} dr, substituted u = a r and split
// into periods of the oscillating factor; the tail beyond the last period is
// the periodic mean times int g.
double radial_integral(const SpectralDensity& sd, double a, const QuadratureOptions& opts) {
  if (a == 0.0) return 0.0;
  const double alpha = sd.alpha();
  const double nm1 = static_cast<double>(sd.dim()) - 1.0;
  const double log_a = std::log(a);
  auto log_g = [&](double u) { return sd.log_radial(u / a) + nm1 * (std::log(u) - log_a); };
  auto g = [&](double u) { return std::exp(log_g(u)); };
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double s = std::abs(2.0 * std::sin(0.5 * u));
    if (s == 0.0) return 0.0;
    return std::exp(alpha * std::log(s) + log_g(u));
  };
  static thread_local boost::math::quadrature::tanh_sinh<double> periodic;
  static thread_local boost::math::quadrature::exp_sinh<double> tail;
  const double two_pi = 2.0 * std::numbers::pi;
  const double mean = periodic_mean(alpha);
  double partial = 0.0;
  std::size_t k = 0;
  for (;; ++k) {
    const double lo = two_pi * static_cast<double>(k);
    partial += periodic.integrate(integrand, lo, lo + two_pi, 1e-10);
    const double next = lo + two_pi;
    const double est = mean * two_pi * std::abs(g(next) - g(next + two_pi));
    if (k >= 1 && est < 0.01 * opts.rel_tol * partial) break;
    if (k + 1 >= opts.max_periods) {
      throw RuntimeError("scale_param: quadrature did not converge; achieved relative tolerance " +
                         csv::to_string(est / partial) + " after " + std::to_string(k + 1) + " periods");
    }
  }
  const double l = two_pi * static_cast<double>(k + 1);
  const double tail_value = mean * tail.integrate(g, l, std::numeric_limits<double>::infinity());
  const double total = (partial + tail_value) / a;
  if (!std::isfinite(total)) throw RuntimeError("scale_param: non-finite quadrature result");
  return total;
}

}  // namespace

const char* to_string(SpectralFamily family) { return family == SpectralFamily::hfsm ? "hfsm" : "riesz_bessel"; }

SpectralDensity SpectralDensity::hfsm(double alpha, double hurst, std::size_t dim, double c) {
  require_alpha(alpha);
  detail::require(dim >= 1, "spectral density: N must be >= 1");
  if (!(hurst > 0.0 && hurst < 1.0))
    detail::fail_argument("hfsm: H = " + csv::to_string(hurst) + " is outside the admissible interval (0, 1)");
  if (!(c > 0.0 && std::isfinite(c))) detail::fail_argument("spectral density: c must be positive");
  SpectralDensity sd(SpectralFamily::hfsm, alpha, dim);
  sd.hurst_ = hurst;
  sd.c_ = c;
  return sd;
}

SpectralDensity SpectralDensity::riesz_bessel(double alpha, double gamma, double eta, std::size_t dim, double c) {
  require_alpha(alpha);
  detail::require(dim >= 1, "spectral density: N must be >= 1");
  const double n = static_cast<double>(dim);
  if (!(eta + gamma > n / 2.0))
    detail::fail_argument("riesz_bessel: eta + gamma = " + csv::to_string(eta + gamma) + " must exceed N/2 = " +
                          csv::to_string(n / 2.0));
  if (!(2.0 * gamma >= 0.0 && 2.0 * gamma < alpha + n))
    detail::fail_argument("riesz_bessel: 2 gamma = " + csv::to_string(2.0 * gamma) + " is outside [0, alpha + N)");
  if (!(c > 0.0 && std::isfinite(c))) detail::fail_argument("spectral density: c must be positive");
  SpectralDensity sd(SpectralFamily::riesz_bessel, alpha, dim);
  sd.gamma_ = gamma;
  sd.eta_ = eta;
  sd.c_ = c;
  return sd;
}

SpectralDensity SpectralDensity::with_c(double c) const {
  if (!(c > 0.0 && std::isfinite(c))) detail::fail_argument("spectral density: c must be positive");
  SpectralDensity sd = *this;
  sd.c_ = c;
  return sd;
}

double SpectralDensity::log_radial(double r) const {
  const double lr = std::log(r);
  if (family_ == SpectralFamily::hfsm) return std::log(c_) - (alpha_ * hurst_ + static_cast<double>(dim_)) * lr;
  // log(1 + r^2) without overflow for large r.
  const double log1pr2 = lr > 0.0 ? 2.0 * lr + std::log1p(std::exp(-2.0 * lr)) : std::log1p(r * r);
  return std::log(c_) - 2.0 * gamma_ * lr - eta_ * log1pr2;
}

double SpectralDensity::radial(double r) const {
  if (!(r > 0.0)) detail::fail_argument("spectral density: x = 0 is singular");
  return std::exp(log_radial(r));
}

double SpectralDensity::operator()(std::span<const double> x) const {
  detail::require(x.size() == dim_, "spectral density: dimension mismatch");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return radial(std::sqrt(r2));
}

double scale_integral(const SpectralDensity& sd, std::span<const double> t, const QuadratureOptions& opts) {
  detail::require(t.size() == sd.dim(), "scale_param: dimension mismatch");
  double t2 = 0.0;
  for (double v : t) t2 += v * v;
  const double tn = std::sqrt(t2);
  if (tn == 0.0) return 0.0;
  if (sd.dim() == 1) return 2.0 * radial_integral(sd, tn, opts);
  const auto& gl = gauss_legendre_64();
  const double half = std::numbers::pi / 4.0;  // maps [-1,1] onto [0, pi/2]
  const double power = static_cast<double>(sd.dim()) - 2.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double phi = half * (gl.nodes[i] + 1.0);
    const double w = gl.weights[i] * half * std::pow(std::sin(phi), power);
    acc += w * radial_integral(sd, tn * std::cos(phi), opts);
  }
  return sphere_area(sd.dim() - 1) * 2.0 * acc;
}

double scale_param(const SpectralDensity& sd, std::span<const double> t, const QuadratureOptions& opts) {
  return std::pow(scale_integral(sd, t, opts), 1.0 / sd.alpha());
}

double hfss_scale_param(double alpha, std::span<const double> hurst, std::span<const double> t,
                        const QuadratureOptions& opts) {
  detail::require(hurst.size() == t.size() && !t.empty(), "hfss_scale_param: dimension mismatch");
  double integral = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const auto sd = SpectralDensity::hfsm(alpha, hurst[j], 1);
    const double tj = t[j];
    integral *= scale_integral(sd, std::span<const double>(&tj, 1), opts);
  }
  return std::pow(integral, 1.0 / alpha);
}

double normalize_hfsm(double alpha, double hurst, std::size_t dim, const QuadratureOptions& opts) {
  const auto sd = SpectralDensity::hfsm(alpha, hurst, dim, 1.0);
  std::vector<double> e1(dim, 0.0);
  e1[0] = 1.0;
  return 1.0 / scale_integral(sd, e1, opts);
}

EnvelopeFit envelope_check(const SpectralDensity& sd, double hurst_target) {
  detail::require(hurst_target > 0.0, "envelope_check: H_target must be positive");
  const double p = sd.alpha() * hurst_target + static_cast<double>(sd.dim());
  constexpr int steps = 120;  // 20 per decade over [1, 1e6]
  std::vector<double> log_r, log_v;
  double max_log = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= steps; ++k) {
    const double lr = std::log(10.0) * k / 20.0;
    const double lv = sd.log_radial(std::exp(lr)) + p * lr;
    max_log = std::max(max_log, lv);
    if (k >= steps - 20) {
      log_r.push_back(lr);
      log_v.push_back(lv);
    }
  }
  EnvelopeFit fit;
  fit.tail_slope = stats::least_squares(log_r, log_v).slope;
  fit.violated = fit.tail_slope > 1e-3;
  fit.k11 = fit.violated ? std::numeric_limits<double>::infinity() : std::exp(max_log);
  return fit;
}

double pitman_exponent(const SpectralDensity& sd) {
  if (sd.family() != SpectralFamily::riesz_bessel)
    detail::fail_argument("pitman_ratio: only the riesz_bessel family is supported");
  return (2.0 * (sd.eta() + sd.gamma()) - static_cast<double>(sd.dim())) / sd.alpha();
}

double pitman_normalization(double alpha, double gamma, double eta, std::size_t dim, const QuadratureOptions& opts) {
  const double h = (2.0 * (eta + gamma) - static_cast<double>(dim)) / alpha;
  if (!(h > 0.0 && h < 1.0))
    detail::fail_argument("pitman_normalization: requires 0 < 2(gamma + eta) - N < alpha");
  return normalize_hfsm(alpha, h, dim, opts);
}

std::vector<double> pitman_ratio(const SpectralDensity& sd, const std::vector<std::vector<double>>& t_list,
                                 const QuadratureOptions& opts) {
  const double h = pitman_exponent(sd);
  if (!(h * sd.alpha() < sd.alpha()))
    detail::fail_argument("pitman_ratio: requires 2(gamma + eta) - N < alpha");
  std::vector<double> out;
  out.reserve(t_list.size());
  for (const auto& t : t_list) {
    double t2 = 0.0;
    for (double v : t) t2 += v * v;
    detail::require(t2 > 0.0, "pitman_ratio: t must be nonzero");
    out.push_back(scale_param(sd, t, opts) / std::pow(std::sqrt(t2), h));
  }
  return out;
}

}  // namespace stablab
