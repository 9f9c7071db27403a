#include "stablab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stablab/csv.hpp"
#include "stablab/error.hpp"
#include "stablab/parallel.hpp"
#include "stablab/stats.hpp"

namespace stablab {

// ---------------------------------------------------------------------------
// SigmaFunction

SigmaFunction SigmaFunction::power(double delta) {
  if (!(delta > 0.0)) detail::fail_argument("sigma: power exponent must be positive");
  return SigmaFunction(Form::power, delta, 0.0);
}

SigmaFunction SigmaFunction::power_log(double hurst, double log_power) {
  if (!(hurst > 0.0)) detail::fail_argument("sigma: H must be positive");
  if (!std::isfinite(log_power)) detail::fail_argument("sigma: log power must be finite");
  return SigmaFunction(Form::power_log, hurst, log_power);
}

SigmaFunction SigmaFunction::anisotropic(std::vector<double> hurst, double log_power) {
  detail::require(!hurst.empty(), "sigma: anisotropic form needs H_1..H_N");
  for (double h : hurst)
    if (!(h > 0.0 && h <= 1.0)) detail::fail_argument("sigma: every H_j must lie in (0, 1]");
  SigmaFunction s(Form::anisotropic, 1.0, log_power);
  s.hurst_vec_ = std::move(hurst);
  return s;
}

double SigmaFunction::operator()(double h) const {
  if (!(h > 0.0 && h < 1.0)) detail::fail_argument("sigma: h = " + csv::to_string(h) + " is outside (0, 1)");
  const double base = std::pow(h, hurst_);
  return log_power_ == 0.0 ? base : base * std::pow(std::log(1.0 / h), log_power_);
}

double SigmaFunction::of_pair(std::span<const double> s, std::span<const double> t) const {
  detail::require(form_ == Form::anisotropic, "sigma: of_pair needs the anisotropic form");
  detail::require(s.size() == hurst_vec_.size() && t.size() == hurst_vec_.size(), "sigma: dimension mismatch");
  double d = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) d += std::pow(std::abs(s[j] - t[j]), hurst_vec_[j]);
  return (*this)(d);
}

double SigmaFunction::doubling_constant(int k_lo, int k_hi) const {
  detail::require(k_lo >= 2 && k_hi > k_lo, "sigma: doubling grid needs 2 <= k_lo < k_hi");
  double k1 = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double h = std::ldexp(1.0, -k);
    k1 = std::max(k1, (*this)(2.0 * h) / (*this)(h));
  }
  return k1;
}

bool SigmaFunction::log_condition(double eps0, double gamma, int k_lo, int k_hi) const {
  detail::require(gamma > 0.0 && gamma <= 1.0, "sigma: gamma must lie in (0, 1]");
  std::vector<double> v;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double h = std::ldexp(1.0, -k);
    v.push_back((*this)(h) * std::pow(std::log(1.0 / h), (1.0 + eps0) / gamma));
  }
  const double peak = *std::max_element(v.begin(), v.end());
  const std::size_t tail = v.size() - v.size() / 4;
  for (std::size_t i = tail; i < v.size(); ++i)
    if (v[i] >= v[i - 1]) return false;
  return v.back() < 1e-3 * peak;
}

// ---------------------------------------------------------------------------
// Denominators

double ModulusDenominator::operator()(double h) const {
  if (!(h > 0.0 && h < 1.0)) detail::fail_argument("modulus denominator: h must lie in (0, 1)");
  return std::pow(h, hurst) * std::pow(std::log(1.0 / h), log_power);
}

ModulusDenominator ModulusDenominator::theorem(const SigmaFunction& sigma, double gamma, double eps) {
  detail::require(sigma.form() != SigmaFunction::Form::anisotropic, "modulus denominator: isotropic sigma required");
  detail::require(gamma > 0.0 && gamma <= 1.0 && eps > 0.0, "modulus denominator: need gamma in (0,1], eps > 0");
  return {sigma.hurst(), sigma.log_power() + (1.0 + eps) / gamma};
}

ModulusDenominator ModulusDenominator::harmonizable(double hurst, double alpha, double eps) {
  detail::require(alpha > 0.0 && alpha < 2.0 && eps > 0.0, "modulus denominator: need alpha in (0,2), eps > 0");
  return {hurst, (2.0 + eps) / alpha};
}

ModulusDenominator ModulusDenominator::sheet(double alpha, double eps) {
  detail::require(alpha > 0.0 && alpha < 2.0 && eps > 0.0, "modulus denominator: need alpha in (0,2), eps > 0");
  return {1.0, (2.0 + eps) / alpha};
}

// ---------------------------------------------------------------------------
// Increment maxima

NeighborCache::NeighborCache(const NetFamily& family, int min_level) : family_(&family), min_level_(min_level) {
  detail::require(min_level >= 1 && min_level < family.max_level(),
                  "NeighborCache: min_level must lie below the deepest level");
  for (int p = min_level + 1; p <= family.max_level(); ++p)
    tables_.push_back(build_neighbor_table(family.level(p - 1), family.level(p)));
}

const NeighborTable& NeighborCache::table(int p) const {
  if (p <= min_level_ || p > family_->max_level())
    detail::fail_argument("increment_max_stat: level " + std::to_string(p) + " has no stored coarse level");
  return tables_[static_cast<std::size_t>(p - min_level_ - 1)];
}

double increment_max_stat(std::span<const double> coarse_values, std::span<const double> fine_values,
                          const NeighborTable& table, double gamma) {
  detail::require(table.offsets.size() == fine_values.size() + 1, "increment_max_stat: fine level size mismatch");
  if (!(gamma > 0.0)) detail::fail_argument("increment_max_stat: gamma must be positive");
  double m = 0.0;
  for (std::size_t i = 0; i < fine_values.size(); ++i) {
    const double x = fine_values[i];
    for (std::uint32_t c : table.of(i)) {
      detail::require(c < coarse_values.size(), "increment_max_stat: coarse level size mismatch");
      m = std::max(m, std::abs(x - coarse_values[c]));
    }
  }
  return std::pow(m, gamma);
}

double increment_max_stat(const NeighborCache& cache, const FamilyPath& path, int p, double gamma) {
  if (p - 1 < path.min_level || p - path.min_level >= static_cast<int>(path.levels.size()))
    detail::fail_argument("increment_max_stat: path lacks level " + std::to_string(p) + " or " +
                          std::to_string(p - 1));
  return increment_max_stat(path.at(p - 1), path.at(p), cache.table(p), gamma);
}

std::vector<FamilyPath> simulate_paths(const FieldModel& model, const NetFamily& family, int min_level,
                                       const SeriesBudget& budget, std::size_t replicates, std::size_t workers) {
  std::vector<FamilyPath> out(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    SeriesBudget b = budget;
    b.stream_id = budget.stream_id + r;
    out[r].min_level = min_level;
    out[r].levels = simulate_family(model, family, min_level, b);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Tail sums

MomconReport momcon_tail_check(const NeighborCache& cache, const std::vector<FamilyPath>& paths, int n_lo, int n_hi,
                               const SigmaFunction& sigma, double gamma, double growth_limit) {
  detail::require(!paths.empty(), "momcon_tail_check: no replicates");
  const int top = cache.family().max_level();
  detail::require(n_lo > cache.min_level() && n_hi >= n_lo && n_hi <= top,
                  "momcon_tail_check: n range must lie within the stored levels");
  detail::require(top - n_lo >= 2, "momcon_tail_check: need at least three levels for the remainder fit");
  MomconReport rep;
  for (int p = n_lo; p <= top; ++p) {
    double s = 0.0;
    for (const auto& path : paths) s += increment_max_stat(cache, path, p, gamma);
    rep.levels.push_back(p);
    rep.mean_stat.push_back(s / static_cast<double>(paths.size()));
  }
  const std::size_t l = rep.mean_stat.size();
  std::vector<double> x, y;
  for (std::size_t i = l - 3; i < l; ++i) {
    x.push_back(static_cast<double>(rep.levels[i]));
    y.push_back(std::log(rep.mean_stat[i]));
  }
  const bool zero_field = rep.mean_stat.back() == 0.0;
  rep.geometric_ratio = zero_field ? 0.0 : std::exp(stats::least_squares(x, y).slope);
  rep.non_geometric = rep.geometric_ratio > 0.9;
  rep.remainder = rep.geometric_ratio < 1.0
                      ? rep.mean_stat.back() * rep.geometric_ratio / (1.0 - rep.geometric_ratio)
                      : std::numeric_limits<double>::infinity();
  double min_k2 = std::numeric_limits<double>::infinity();
  for (int n = n_lo; n <= n_hi; ++n) {
    double s = rep.remainder;
    for (std::size_t i = 0; i < l; ++i)
      if (rep.levels[i] >= n) s += rep.mean_stat[i];
    rep.n.push_back(n);
    rep.tail_sum.push_back(s);
    const double k2 = s / std::pow(sigma(std::ldexp(1.0, -n)), gamma);
    rep.k2.push_back(k2);
    rep.k2_max = std::max(rep.k2_max, k2);
    min_k2 = std::min(min_k2, k2);
  }
  if (zero_field) {
    rep.spread = 1.0;
    rep.growth = 0.0;
    rep.stable = true;
    return rep;
  }
  rep.spread = rep.k2_max / min_k2;
  if (rep.n.size() >= 2) {
    std::vector<double> xn, yk;
    for (std::size_t i = 0; i < rep.n.size(); ++i) {
      xn.push_back(rep.n[i]);
      yk.push_back(std::log2(rep.k2[i]));
    }
    rep.growth = stats::least_squares(xn, yk).slope;
  }
  rep.stable = std::isfinite(rep.k2_max) && rep.spread <= 2.0 && rep.growth <= growth_limit;
  return rep;
}

// ---------------------------------------------------------------------------
// Modulus ratios

ModulusReport modulus_ratio(const NeighborCache& cache, const std::vector<FamilyPath>& paths,
                            const ModulusSpec& spec) {
  detail::require(!paths.empty(), "modulus_ratio: no replicates");
  const NetFamily& family = cache.family();
  const int top = family.max_level();
  detail::require(spec.n_lo >= cache.min_level() && spec.n_hi >= spec.n_lo,
                  "modulus_ratio: n range must start at or above the cached minimum level");
  if (spec.n_hi + 1 > top)
    detail::fail_argument("modulus_ratio: no neighbor pairs at h = 2^-" + std::to_string(spec.n_hi) +
                          "; the family needs level " + std::to_string(spec.n_hi + 1));
  const bool aniso = spec.mode == ModulusMode::anisotropic;
  if (aniso) detail::require(spec.hurst.size() == family.dim(), "modulus_ratio: one H_j per dimension is required");

  // Per-pair denominators D |log D|^power for the anisotropic mode.
  std::vector<std::vector<double>> pair_den;
  if (aniso) {
    std::vector<double> a(family.dim()), b(family.dim());
    for (int p = spec.n_lo + 1; p <= top; ++p) {
      const NeighborTable& t = cache.table(p);
      const Net& fine = family.level(p);
      const Net& coarse = family.level(p - 1);
      std::vector<double> den;
      den.reserve(t.indices.size());
      for (std::size_t i = 0; i < fine.size(); ++i) {
        fine.point_into(i, a);
        for (std::uint32_t c : t.of(i)) {
          coarse.point_into(c, b);
          double d = 0.0;
          for (std::size_t j = 0; j < a.size(); ++j) d += std::pow(std::abs(a[j] - b[j]), spec.hurst[j]);
          if (!(d < 1.0))
            detail::fail_argument("modulus_ratio: D(s,t) >= 1 at level " + std::to_string(p) +
                                  "; raise n_lo");
          den.push_back(spec.denominator(d));
        }
      }
      pair_den.push_back(std::move(den));
    }
  }

  ModulusReport rep;
  for (int n = spec.n_lo; n <= spec.n_hi; ++n) {
    rep.n.push_back(n);
    rep.h.push_back(std::ldexp(1.0, -n));
    rep.denominator.push_back(aniso ? 0.0 : spec.denominator(rep.h.back()));
  }
  const std::size_t levels = static_cast<std::size_t>(top - spec.n_lo);
  for (const auto& path : paths) {
    std::vector<double> inc(levels, 0.0), ratio(levels, 0.0);
    for (int p = spec.n_lo + 1; p <= top; ++p) {
      const std::size_t li = static_cast<std::size_t>(p - spec.n_lo - 1);
      const NeighborTable& t = cache.table(p);
      const auto& fine = path.at(p);
      const auto& coarse = path.at(p - 1);
      double m = 0.0, r = 0.0;
      std::size_t pair = 0;
      for (std::size_t i = 0; i < fine.size(); ++i) {
        for (std::uint32_t c : t.of(i)) {
          const double d = std::abs(fine[i] - coarse[c]);
          m = std::max(m, d);
          if (aniso) r = std::max(r, d / pair_den[li][pair]);
          ++pair;
        }
      }
      inc[li] = m;
      ratio[li] = r;
    }
    std::vector<double> sup_row, ratio_row;
    for (std::size_t i = 0; i < rep.n.size(); ++i) {
      // levels p = n+1 .. top have indices n - n_lo .. levels - 1
      double s = 0.0, r = 0.0;
      for (std::size_t li = i; li < levels; ++li) {
        s = std::max(s, inc[li]);
        r = std::max(r, ratio[li]);
      }
      sup_row.push_back(s);
      ratio_row.push_back(aniso ? r : s / rep.denominator[i]);
    }
    rep.sup_increments.push_back(std::move(sup_row));
    rep.ratios.push_back(std::move(ratio_row));
  }
  std::vector<double> column(paths.size());
  for (std::size_t i = 0; i < rep.n.size(); ++i) {
    for (std::size_t r = 0; r < paths.size(); ++r) column[r] = rep.ratios[r][i];
    rep.median_ratio.push_back(stats::median(column));
    rep.q25_ratio.push_back(stats::quantile(column, 0.25));
    rep.q75_ratio.push_back(stats::quantile(column, 0.75));
  }
  rep.nonincreasing = true;
  for (std::size_t i = 1; i < rep.median_ratio.size(); ++i)
    if (rep.median_ratio[i] > rep.median_ratio[i - 1]) rep.nonincreasing = false;
  rep.final_below_initial = rep.median_ratio.back() < rep.median_ratio.front();
  return rep;
}

// ---------------------------------------------------------------------------
// Exponents

double kolmogorov_exponent(double beta, double delta, std::size_t dim) {
  detail::require(dim >= 1, "kolmogorov: N must be >= 1");
  if (!(beta > 0.0 && delta > 0.0)) detail::fail_argument("kolmogorov: beta and delta must be positive");
  return delta / beta;
}

double ext_kol_exponent(double hurst, double theta, double gamma, std::size_t dim) {
  detail::require(dim >= 1, "ext_kol: N must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) detail::fail_argument("ext_kol: gamma must lie in (0, 1]");
  if (!(theta >= 0.0 && theta <= 1.0)) detail::fail_argument("ext_kol: theta must lie in [0, 1]");
  const double n = static_cast<double>(dim);
  if (!(hurst * gamma > n * theta))
    detail::fail_argument("ext_kol: requires H gamma > N theta (" + csv::to_string(hurst * gamma) +
                          " <= " + csv::to_string(n * theta) + ")");
  return hurst - n * theta / gamma;
}

double self_similar_exponent(double hurst, double alpha, std::size_t dim) {
  detail::require(dim >= 1, "self_similar: N must be >= 1");
  if (!(hurst > 0.0 && alpha > 0.0)) detail::fail_argument("self_similar: H and alpha must be positive");
  const double n = static_cast<double>(dim);
  if (!(alpha > n / hurst))
    detail::fail_argument("self_similar: requires alpha > N/H = " + csv::to_string(n / hurst) + ", got alpha = " +
                          csv::to_string(alpha));
  return hurst - n / alpha;
}

}  // namespace stablab
