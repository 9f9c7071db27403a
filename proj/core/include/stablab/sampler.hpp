#pragma once

// Stochastic primitives for the LePage series and the reference sequences:
// Poisson arrivals, rotationally invariant complex Gaussians, the importance
// densities phi, symmetric alpha-stable variates, and heavy-tailed sequences.

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "stablab/rng.hpp"

namespace stablab {

/// Gamma_1 < ... < Gamma_J, partial sums of unit exponentials.
std::vector<double> poisson_arrivals(std::size_t count, RngStream& stream);

/// sigma making E|Re g|^alpha = 1 for g = sigma (Z1 + i Z2).
double gaussian_sigma(double alpha);
std::vector<std::complex<double>> rotational_gaussian(std::size_t count, double alpha, RngStream& stream);

enum class PhiForm { radial, product };

/// Admissible open interval for beta given the field parameters.
std::pair<double, double> beta_window_radial(double alpha, double hurst, std::size_t dim);
std::pair<double, double> beta_window_product(double alpha, std::span<const double> hurst);

struct PhiSample {
  double log_phi = 0.0;
  /// log|x| for the radial form; unused (0) for the product form.
  double log_radius = 0.0;
};

/// Importance density on R^N: a power singularity inside |x| <= 3 and a
/// log-corrected |x|^{-N} tail outside, continuous at 3 and of total mass 1.
/// The product form applies the one-dimensional version to each coordinate.
class PhiDensity {
 public:
  static PhiDensity radial(std::size_t dim, double beta, double eta);
  static PhiDensity product(std::size_t dim, double beta, double eta);

  PhiForm form() const noexcept { return form_; }
  std::size_t dim() const noexcept { return dim_; }
  double beta() const noexcept { return beta_; }
  double eta() const noexcept { return eta_; }
  /// Constant of the inner piece (per coordinate for the product form).
  double inner_const() const noexcept { return inner_const_; }
  double outer_const() const noexcept { return outer_const_; }
  /// P(|x| <= 3) (radial) or P(|x_j| <= 3) (product, per coordinate).
  double inner_mass() const noexcept { return inner_mass_; }

  double density(std::span<const double> x) const;
  double log_density(std::span<const double> x) const;
  /// Radial density profile (radial form) or one-coordinate density at |u| = r.
  double log_profile(double r) const;
  /// Distribution function of |x| (radial) or of |x_j| (product).
  double radius_cdf(double r) const;

  /// Draws x, writing log|x_j| into log_abs. Coordinates overflow to +-inf for
  /// radii beyond the double range; log_abs stays finite.
  PhiSample sample(RngStream& stream, std::span<double> x, std::span<double> log_abs) const;

  friend bool operator==(const PhiDensity&, const PhiDensity&) = default;

 private:
  PhiDensity(PhiForm form, std::size_t dim, double beta, double eta);
  struct RadiusDraw {
    double log_r;
    double log_profile;  // log of the radial profile at r
  };
  /// Radial part from one uniform; n is the effective dimension.
  RadiusDraw draw_radius(double u, double n) const noexcept;

  PhiForm form_;
  std::size_t dim_;
  double beta_;
  double eta_;
  double inner_const_ = 0.0;
  double outer_const_ = 0.0;
  double inner_mass_ = 0.0;
  double log_inner_ = 0.0;
  double log_outer_ = 0.0;
};

/// Symmetric alpha-stable variates with the given scale parameter
/// (Chambers-Mallows-Stuck). alpha = 2 gives N(0, 2 scale^2).
double sas_draw(double alpha, double scale, RngStream& stream);
std::vector<double> sas_oracle(double alpha, double scale, std::size_t count, RngStream& stream);

enum class SequenceKind { iid_pareto, constant, iid_gaussian, gaussian_correlated };

const char* to_string(SequenceKind kind);

struct SequenceSpec {
  SequenceKind kind = SequenceKind::iid_pareto;
  /// Tail index of the Pareto kind: P(xi > u) = u^{-alpha}, u >= 1.
  double alpha = 1.5;
  /// Off-diagonal correlation of the gaussian_correlated kind.
  double delta = 0.5;
};

void validate(const SequenceSpec& spec);

/// Streaming generator for one realization of a reference sequence.
class SequenceGenerator {
 public:
  SequenceGenerator(const SequenceSpec& spec, RngStream stream);
  double next() noexcept;

 private:
  SequenceSpec spec_;
  RngStream stream_;
  double shared_ = 0.0;
  double spare_ = 0.0;
  bool has_spare_ = false;
  double a_ = 0.0;
  double b_ = 0.0;
};

std::vector<double> reference_sequence(const SequenceSpec& spec, std::size_t count, RngStream stream);

}  // namespace stablab
