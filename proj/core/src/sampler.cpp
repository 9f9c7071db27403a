#include "stablab/sampler.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stablab/csv.hpp"
#include "stablab/error.hpp"

namespace stablab {

namespace {

constexpr double kBreak = 3.0;
const double kLogBreak = std::log(kBreak);
const double kLogLogBreak = std::log(kLogBreak);

void require_alpha_open(double alpha, const char* where) {
  if (!(alpha > 0.0 && alpha < 2.0))
    detail::fail_argument(std::string(where) + ": alpha = " + csv::to_string(alpha) +
                          " is outside the admissible interval (0, 2)");
}

// Surface area of the unit sphere in R^N.
double sphere_area(std::size_t n) {
  const double h = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

}  // namespace

std::vector<double> poisson_arrivals(std::size_t count, RngStream& stream) {
  detail::require(count >= 1, "poisson_arrivals: J must be >= 1");
  std::vector<double> out(count);
  double g = 0.0;
  for (auto& v : out) {
    g += stream.exponential();
    v = g;
  }
  return out;
}

double gaussian_sigma(double alpha) {
  require_alpha_open(alpha, "gaussian_sigma");
  const double m = std::pow(2.0, alpha / 2.0) * std::tgamma((alpha + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  return std::pow(m, -1.0 / alpha);
}

std::vector<std::complex<double>> rotational_gaussian(std::size_t count, double alpha, RngStream& stream) {
  const double sigma = gaussian_sigma(alpha);
  std::vector<std::complex<double>> out(count);
  for (auto& g : out) {
    const auto [z1, z2] = stream.normal_pair();
    g = {sigma * z1, sigma * z2};
  }
  return out;
}

std::pair<double, double> beta_window_radial(double alpha, double hurst, std::size_t dim) {
  require_alpha_open(alpha, "beta_window_radial");
  detail::require(hurst > 0.0 && hurst < 1.0, "beta_window_radial: H must lie in (0, 1)");
  const double n = static_cast<double>(dim);
  return {n - 2.0 * alpha * (1.0 - hurst) / (2.0 - alpha), n};
}

std::pair<double, double> beta_window_product(double alpha, std::span<const double> hurst) {
  require_alpha_open(alpha, "beta_window_product");
  detail::require(!hurst.empty(), "beta_window_product: at least one H_j is required");
  double lo = -std::numeric_limits<double>::infinity();
  for (double h : hurst) {
    detail::require(h > 0.0 && h < 1.0, "beta_window_product: every H_j must lie in (0, 1)");
    lo = std::max(lo, 1.0 - 2.0 * alpha * (1.0 - h) / (2.0 - alpha));
  }
  return {lo, 1.0};
}

// ---------------------------------------------------------------------------
// PhiDensity

PhiDensity::PhiDensity(PhiForm form, std::size_t dim, double beta, double eta)
    : form_(form), dim_(dim), beta_(beta), eta_(eta) {
  detail::require(dim >= 1, "PhiDensity: dimension must be >= 1");
  if (!(eta > 0.0)) detail::fail_argument("PhiDensity: eta = " + csv::to_string(eta) + " must be positive");
  const double n = form == PhiForm::radial ? static_cast<double>(dim) : 1.0;
  if (!(beta < n) || !std::isfinite(beta))
    detail::fail_argument("PhiDensity: beta = " + csv::to_string(beta) + " must be below " + csv::to_string(n));
  const double s = form == PhiForm::radial ? sphere_area(dim) : 2.0;
  // Continuity at 3 fixes outer/inner; unit mass fixes the scale.
  const double inner_shape = 1.0 / (n - beta);
  const double outer_shape = kLogBreak / eta;
  inner_const_ = 1.0 / (s * std::pow(kBreak, n - beta) * (inner_shape + outer_shape));
  outer_const_ = inner_const_ * std::pow(kBreak, n - beta) * std::pow(kLogBreak, 1.0 + eta);
  inner_mass_ = inner_shape / (inner_shape + outer_shape);
  log_inner_ = std::log(inner_const_);
  log_outer_ = std::log(outer_const_);
}

PhiDensity PhiDensity::radial(std::size_t dim, double beta, double eta) {
  return PhiDensity(PhiForm::radial, dim, beta, eta);
}

PhiDensity PhiDensity::product(std::size_t dim, double beta, double eta) {
  return PhiDensity(PhiForm::product, dim, beta, eta);
}

double PhiDensity::log_profile(double r) const {
  const double n = form_ == PhiForm::radial ? static_cast<double>(dim_) : 1.0;
  if (r <= kBreak) return log_inner_ - beta_ * std::log(r);
  const double lr = std::log(r);
  return log_outer_ - n * lr - (1.0 + eta_) * std::log(lr);
}

double PhiDensity::log_density(std::span<const double> x) const {
  detail::require(x.size() == dim_, "PhiDensity: dimension mismatch");
  if (form_ == PhiForm::radial) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return log_profile(std::sqrt(r2));
  }
  double s = 0.0;
  for (double v : x) s += log_profile(std::abs(v));
  return s;
}

double PhiDensity::density(std::span<const double> x) const { return std::exp(log_density(x)); }

double PhiDensity::radius_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  const double n = form_ == PhiForm::radial ? static_cast<double>(dim_) : 1.0;
  if (r <= kBreak) return inner_mass_ * std::pow(r / kBreak, n - beta_);
  return inner_mass_ + (1.0 - inner_mass_) * (1.0 - std::pow(kLogBreak / std::log(r), eta_));
}

PhiDensity::RadiusDraw PhiDensity::draw_radius(double u, double n) const noexcept {
  if (u < inner_mass_) {
    const double lr = kLogBreak + std::log(u / inner_mass_) / (n - beta_);
    return {lr, log_inner_ - beta_ * lr};
  }
  // log(log r) is linear in log w, so one log and one exp cover both.
  const double s = -std::log((u - inner_mass_) / (1.0 - inner_mass_)) / eta_;
  const double lr = kLogBreak * std::exp(s);
  return {lr, log_outer_ - n * lr - (1.0 + eta_) * (kLogLogBreak + s)};
}

PhiSample PhiDensity::sample(RngStream& stream, std::span<double> x, std::span<double> log_abs) const {
  PhiSample out;
  if (form_ == PhiForm::product || dim_ == 1) {
    double log_phi = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      // Radius from the top 52 bits, sign from the lowest bit of the same word.
      const std::uint64_t bits = stream.next_u64();
      const RadiusDraw d = draw_radius(RngStream::to_uniform(bits), 1.0);
      const double sign = (bits & 1u) != 0 ? -1.0 : 1.0;
      x[j] = sign * std::exp(d.log_r);
      log_abs[j] = d.log_r;
      log_phi += d.log_profile;
    }
    out.log_phi = log_phi;
    out.log_radius = form_ == PhiForm::radial ? log_abs[0] : 0.0;
    return out;
  }
  const double n = static_cast<double>(dim_);
  const RadiusDraw d = draw_radius(stream.uniform(), n);
  const double lr = d.log_r;
  double norm2 = 0.0;
  for (std::size_t j = 0; j < dim_; j += 2) {
    const auto [z1, z2] = stream.normal_pair();
    x[j] = z1;
    norm2 += z1 * z1;
    if (j + 1 < dim_) {
      x[j + 1] = z2;
      norm2 += z2 * z2;
    }
  }
  const double log_norm = 0.5 * std::log(norm2);
  const double r = std::exp(lr);
  for (std::size_t j = 0; j < dim_; ++j) {
    const double log_dir = std::log(std::abs(x[j])) - log_norm;
    log_abs[j] = lr + log_dir;
    x[j] = std::copysign(r * std::exp(log_dir), x[j]);
  }
  out.log_radius = lr;
  out.log_phi = d.log_profile;
  return out;
}

// ---------------------------------------------------------------------------
// Stable variates

double sas_draw(double alpha, double scale, RngStream& stream) {
  const double v = std::numbers::pi * (stream.uniform() - 0.5);
  const double w = stream.exponential();
  if (alpha == 1.0) return scale * std::tan(v);
  const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return scale * x;
}

std::vector<double> sas_oracle(double alpha, double scale, std::size_t count, RngStream& stream) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    detail::fail_argument("sas_oracle: alpha = " + csv::to_string(alpha) + " is outside (0, 2]");
  if (!(scale > 0.0)) detail::fail_argument("sas_oracle: scale must be positive");
  std::vector<double> out(count);
  for (auto& v : out) v = sas_draw(alpha, scale, stream);
  return out;
}

// ---------------------------------------------------------------------------
// Reference sequences

const char* to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::iid_pareto: return "iid_pareto";
    case SequenceKind::constant: return "constant";
    case SequenceKind::iid_gaussian: return "iid_gaussian";
    case SequenceKind::gaussian_correlated: return "gaussian_correlated";
  }
  return "unknown";
}

void validate(const SequenceSpec& spec) {
  if (spec.kind == SequenceKind::iid_pareto && !(spec.alpha > 0.0 && std::isfinite(spec.alpha)))
    detail::fail_argument("sequence: pareto alpha = " + csv::to_string(spec.alpha) + " must be positive");
  if (spec.kind == SequenceKind::gaussian_correlated && !(spec.delta > 0.0 && spec.delta < 1.0))
    detail::fail_argument("sequence: delta = " + csv::to_string(spec.delta) + " is outside (0, 1)");
}

SequenceGenerator::SequenceGenerator(const SequenceSpec& spec, RngStream stream) : spec_(spec), stream_(stream) {
  validate(spec);
  switch (spec.kind) {
    case SequenceKind::constant:
      shared_ = stream_.normal();
      break;
    case SequenceKind::gaussian_correlated:
      shared_ = stream_.normal();
      a_ = std::sqrt(spec.delta);
      b_ = std::sqrt(1.0 - spec.delta);
      break;
    case SequenceKind::iid_pareto:
      a_ = -1.0 / spec.alpha;
      break;
    case SequenceKind::iid_gaussian:
      break;
  }
}

double SequenceGenerator::next() noexcept {
  switch (spec_.kind) {
    case SequenceKind::iid_pareto:
      return std::exp(a_ * std::log(stream_.uniform()));
    case SequenceKind::constant:
      return shared_;
    case SequenceKind::iid_gaussian:
    case SequenceKind::gaussian_correlated: {
      double z;
      if (has_spare_) {
        z = spare_;
        has_spare_ = false;
      } else {
        const auto [z1, z2] = stream_.normal_pair();
        z = z1;
        spare_ = z2;
        has_spare_ = true;
      }
      return spec_.kind == SequenceKind::iid_gaussian ? z : a_ * shared_ + b_ * z;
    }
  }
  return 0.0;
}

std::vector<double> reference_sequence(const SequenceSpec& spec, std::size_t count, RngStream stream) {
  detail::require(count >= 1, "reference_sequence: n must be >= 1");
  SequenceGenerator gen(spec, stream);
  std::vector<double> out(count);
  for (auto& v : out) v = gen.next();
  return out;
}

}  // namespace stablab
