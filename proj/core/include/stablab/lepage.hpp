#pragma once

// Field models and truncated LePage series
//   Y(t) = C Re( sum_{j<=J} Gamma_j^{-1/alpha} phi(xi_j)^{-1/alpha} h(t, xi_j) g_j ).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stablab/nets.hpp"
#include "stablab/point_set.hpp"
#include "stablab/sampler.hpp"
#include "stablab/spectral.hpp"

namespace stablab {

/// Pieces of the series constant C_alpha = A^{1/alpha} B^{-1/alpha}.
struct CAlphaParts {
  double a = 0.0;             // (1/2pi) int_0^pi |cos|^alpha, closed form
  double a_quadrature = 0.0;
  double b = 0.0;             // int_0^inf sin(x) x^{-alpha} dx, closed form
  double b_quadrature = 0.0;
  double c = 0.0;             // from the closed forms
  double c_quadrature = 0.0;  // from the quadratures
};

CAlphaParts c_alpha_parts(double alpha);
double c_alpha(double alpha);
/// Constant the simulator multiplies the series by: B^{-1/alpha}, which gives
/// Y(t) the scale parameter (int |h(t,x)|^alpha dx)^{1/alpha}.
double series_constant(double alpha);

enum class KernelFamily { hfsm, riesz_bessel, hfss };

const char* to_string(KernelFamily family);

struct PhiChoice {
  std::optional<double> beta;  // default: midpoint of the admissible window
  double eta = 0.1;
};

class FieldModel {
 public:
  /// c defaults to normalize_hfsm(alpha, H, N).
  static FieldModel hfsm(double alpha, double hurst, std::size_t dim, std::optional<double> c = {},
                         PhiChoice phi = {});
  static FieldModel riesz_bessel(double alpha, double gamma, double eta, std::size_t dim, double c = 1.0,
                                 PhiChoice phi = {});
  static FieldModel hfss(double alpha, std::vector<double> hurst, PhiChoice phi = {});

  KernelFamily family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t dim() const noexcept { return dim_; }
  /// H for hfsm; the Pitman exponent for riesz_bessel (capped below 1) when choosing phi.
  double hurst() const noexcept { return hurst_; }
  std::span<const double> hurst_vector() const noexcept { return hurst_vec_; }
  double gamma() const noexcept { return gamma_; }
  double eta() const noexcept { return eta_; }
  double density_c() const noexcept { return density_c_; }
  const PhiDensity& phi() const noexcept { return phi_; }
  /// Multiplier applied to the kernel; 0 gives the zero field.
  double normalization() const noexcept { return normalization_; }
  FieldModel with_normalization(double value) const;

  /// Spectral density (hfsm and riesz_bessel only).
  SpectralDensity spectral() const;
  /// h(t, x) including the normalization.
  std::complex<double> kernel(std::span<const double> t, std::span<const double> x) const;
  /// log of normalization * f(x)^{1/alpha} (hfsm, riesz_bessel) or of
  /// normalization * prod |x_j|^{-(H_j + 1/alpha)} (hfss), from log|x_j|.
  double log_kernel_weight(std::span<const double> log_abs) const;

  /// Stable text form of every parameter, used for hashing.
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  FieldModel(KernelFamily family, double alpha, std::size_t dim, PhiDensity phi)
      : family_(family), alpha_(alpha), dim_(dim), phi_(std::move(phi)) {}

  KernelFamily family_;
  double alpha_;
  std::size_t dim_;
  double hurst_ = 0.0;
  std::vector<double> hurst_vec_;
  double gamma_ = 0.0;
  double eta_ = 0.0;
  double density_c_ = 1.0;
  double normalization_ = 1.0;
  double log_c_ = 0.0;
  double log_normalization_ = 0.0;
  PhiDensity phi_;
};

struct SeriesBudget {
  std::size_t terms = 100000;
  double tolerance = 0.01;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  /// Replaces series_constant(alpha) when set.
  std::optional<double> constant_override;
};

void validate(const SeriesBudget& budget);

struct PathSample {
  std::uint64_t model_hash = 0;
  SeriesBudget budget;
  PointSet grid;
  std::vector<double> values;
};

/// Y on an arbitrary grid. The grid is sorted lexicographically and
/// deduplicated; values follow that order.
PathSample simulate_path(const FieldModel& model, const PointSet& grid, const SeriesBudget& budget);

/// Y on every point of a net (net order), through the lattice recurrences.
PathSample simulate_net(const FieldModel& model, const Net& net, const SeriesBudget& budget);

/// Values on levels min_level..max_level of a family, index [level - min_level],
/// one realization shared by all levels. Dyadic families are evaluated on the
/// finest level and restricted.
std::vector<std::vector<double>> simulate_family(const FieldModel& model, const NetFamily& family, int min_level,
                                                 const SeriesBudget& budget);

/// Y at a handful of points for many replicates: out[r][i] is replicate
/// stream_id + r at point i.
std::vector<std::vector<double>> simulate_replicates(const FieldModel& model, const PointSet& points,
                                                     const SeriesBudget& budget, std::size_t replicates,
                                                     std::size_t workers = 1);

struct TruncationTable {
  std::vector<std::size_t> terms;
  /// deltas[r][i] = sup_t |Y_{J_{i+1}}(t) - Y_{J_i}(t)| for replicate r.
  std::vector<std::vector<double>> deltas;
  /// Median sup-norm of Y_{J_i} per J, across replicates.
  std::vector<double> median_sup;
  std::vector<double> median_delta;
  /// median_delta relative to median_sup at the larger J.
  std::vector<double> relative_delta;
  /// Median over replicates of |sup Y_{J_{i+1}} - sup Y_{J_i}| / sup Y_{J_i}.
  std::vector<double> median_sup_change;
  bool nonincreasing = false;
};

/// Runs each replicate once to the largest J, snapshotting at every J in the
/// list so consecutive deltas reuse the same terms.
TruncationTable truncation_diagnostic(const FieldModel& model, const PointSet& grid,
                                      const std::vector<std::size_t>& terms, std::size_t replicates,
                                      const SeriesBudget& budget, std::size_t workers = 1);

/// CSV with columns t1..tN,value.
void write_path_csv(std::ostream& os, const PathSample& path);
/// Little-endian dump: "STBLPATH", u32 version, u64 model hash, u64 J, u64 seed,
/// u64 stream id, u32 N, u64 count, then count*N coordinates and count values
/// as IEEE-754 doubles.
void write_path_binary(std::ostream& os, const PathSample& path);
PathSample read_path_binary(std::istream& is);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace stablab
