#pragma once

// Increment maxima over neighbor pairs of chaining nets, tail sums of their
// moments, and modulus-of-continuity ratio statistics for simulated paths.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stablab/lepage.hpp"
#include "stablab/nets.hpp"

namespace stablab {

/// sigma(h) = h^H (log 1/h)^{log_power} for h in (0, 1).
class SigmaFunction {
 public:
  enum class Form { power, power_log, anisotropic };

  static SigmaFunction power(double delta);
  static SigmaFunction power_log(double hurst, double log_power);
  /// sigma(h) = h (log 1/h)^{log_power}, applied to D = sum_j |s_j - t_j|^{H_j}.
  static SigmaFunction anisotropic(std::vector<double> hurst, double log_power);

  Form form() const noexcept { return form_; }
  double hurst() const noexcept { return hurst_; }
  double log_power() const noexcept { return log_power_; }
  std::span<const double> hurst_vector() const noexcept { return hurst_vec_; }

  double operator()(double h) const;
  /// sigma(sum_j |s_j - t_j|^{H_j}) (anisotropic form only).
  double of_pair(std::span<const double> s, std::span<const double> t) const;

  /// max sigma(2h)/sigma(h) over h = 2^{-k}, k = k_lo..k_hi.
  double doubling_constant(int k_lo = 2, int k_hi = 40) const;
  /// sigma(h) (log 1/h)^{(1+eps0)/gamma} decreases along h = 2^{-k} for
  /// k >= k_lo and is below its first value by the end of the grid.
  bool log_condition(double eps0, double gamma, int k_lo = 2, int k_hi = 200) const;

 private:
  SigmaFunction(Form form, double hurst, double log_power) : form_(form), hurst_(hurst), log_power_(log_power) {}

  Form form_;
  double hurst_;
  double log_power_;
  std::vector<double> hurst_vec_;
};

/// h^H (log 1/h)^{log_power}.
struct ModulusDenominator {
  double hurst = 0.5;
  double log_power = 0.0;

  double operator()(double h) const;

  /// sigma(h) (log 1/h)^{(1+eps)/gamma} for a power or power_log sigma.
  static ModulusDenominator theorem(const SigmaFunction& sigma, double gamma, double eps);
  /// h^H (log 1/h)^{(2+eps)/alpha}.
  static ModulusDenominator harmonizable(double hurst, double alpha, double eps);
  /// D |log D|^{(2+eps)/alpha}, used with D = sum_j |s_j - t_j|^{H_j}.
  static ModulusDenominator sheet(double alpha, double eps);
};

/// Field values on levels min_level..max_level of a net family.
struct FamilyPath {
  int min_level = 1;
  std::vector<std::vector<double>> levels;

  const std::vector<double>& at(int level) const { return levels[static_cast<std::size_t>(level - min_level)]; }
};

/// Proper-neighbor tables between consecutive levels, built once per family.
class NeighborCache {
 public:
  NeighborCache(const NetFamily& family, int min_level);

  const NetFamily& family() const noexcept { return *family_; }
  int min_level() const noexcept { return min_level_; }
  /// Table from level p - 1 to level p, min_level < p <= max_level.
  const NeighborTable& table(int p) const;

 private:
  const NetFamily* family_;
  int min_level_;
  std::vector<NeighborTable> tables_;
};

/// max over tau in level p and tau' in O_{p-1}(tau) of |X(tau) - X(tau')|^gamma.
double increment_max_stat(std::span<const double> coarse_values, std::span<const double> fine_values,
                          const NeighborTable& table, double gamma);
double increment_max_stat(const NeighborCache& cache, const FamilyPath& path, int p, double gamma);

/// One FamilyPath per replicate (stream ids budget.stream_id + r).
std::vector<FamilyPath> simulate_paths(const FieldModel& model, const NetFamily& family, int min_level,
                                       const SeriesBudget& budget, std::size_t replicates,
                                       std::size_t workers = 1);

struct MomconReport {
  std::vector<int> levels;                 // p
  std::vector<double> mean_stat;           // E[increment_max_stat(p)]
  std::vector<int> n;                      // n_range
  std::vector<double> tail_sum;            // sum_{p>=n} E[...] including remainder
  std::vector<double> k2;                  // tail_sum / sigma(2^{-n})^gamma
  double geometric_ratio = 0.0;
  double remainder = 0.0;
  bool non_geometric = false;              // fitted ratio above 0.9
  double k2_max = 0.0;
  double spread = 0.0;                     // max k2 / min k2
  double growth = 0.0;                     // least-squares slope of log2 k2 against n
  bool stable = false;
};

/// Tail sums of E[increment_max_stat] from simulated paths. The remainder past
/// the deepest level is the last mean times r/(1-r), r fitted on the last
/// three levels. stable: k2 finite with spread <= 2 and growth <= growth_limit.
MomconReport momcon_tail_check(const NeighborCache& cache, const std::vector<FamilyPath>& paths, int n_lo,
                               int n_hi, const SigmaFunction& sigma, double gamma, double growth_limit = 0.02);

enum class ModulusMode { isotropic, anisotropic };

struct ModulusSpec {
  ModulusMode mode = ModulusMode::isotropic;
  ModulusDenominator denominator;
  /// H_j of D = sum_j |s_j - t_j|^{H_j} (anisotropic mode).
  std::vector<double> hurst;
  int n_lo = 4;
  int n_hi = 10;
};

struct ModulusReport {
  std::vector<int> n;
  std::vector<double> h;
  /// sup_increments[r][i]: max |X(t) - X(s)| over neighbor pairs at levels > n_i.
  std::vector<std::vector<double>> sup_increments;
  /// Isotropic: denominator(h_i). Anisotropic: not used (per-pair).
  std::vector<double> denominator;
  std::vector<std::vector<double>> ratios;
  std::vector<double> median_ratio;
  std::vector<double> q25_ratio;
  std::vector<double> q75_ratio;
  bool nonincreasing = false;
  bool final_below_initial = false;
};

/// Isotropic: at h = 2^{-n}, the largest neighbor-pair increment over levels
/// p = n+1..max_level divided by denominator(h). Anisotropic: the largest
/// per-pair ratio |X(t) - X(s)| / denominator(D(s,t)) over the same pairs.
ModulusReport modulus_ratio(const NeighborCache& cache, const std::vector<FamilyPath>& paths,
                            const ModulusSpec& spec);

enum class ExponentKind { kolmogorov, ext_kol, self_similar };

double kolmogorov_exponent(double beta, double delta, std::size_t dim);
/// H - N theta / gamma; requires H gamma > N theta.
double ext_kol_exponent(double hurst, double theta, double gamma, std::size_t dim);
/// H - N / alpha; requires alpha > N / H.
double self_similar_exponent(double hurst, double alpha, std::size_t dim);

}  // namespace stablab
