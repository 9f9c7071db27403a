// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                 runs all criteria
//   acceptance --criterion=N   runs criterion N only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stablab/lepage.hpp"
#include "stablab/modulus.hpp"
#include "stablab/moment_index.hpp"
#include "stablab/nets.hpp"
#include "stablab/parallel.hpp"
#include "stablab/rng.hpp"
#include "stablab/sampler.hpp"
#include "stablab/spectral.hpp"
#include "stablab/stats.hpp"

using namespace stablab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

const std::size_t kWorkers = default_workers();

double slope_of(const std::vector<double>& x, const std::vector<double>& y) { return stats::least_squares(x, y).slope; }

// --- 1: net geometry -------------------------------------------------------

void criterion_1(Outcome& o) {
  for (std::size_t dim = 1; dim <= 3; ++dim)
    for (int n = 1; n <= max_dyadic_level(dim) && n <= 8; ++n)
      o.require(build_net(NetKind::dyadic, dim, n).size() == (std::size_t{1} << (n * static_cast<int>(dim))),
                "size N=" + std::to_string(dim) + " n=" + std::to_string(n));

  const int levels[] = {0, 12, 8, 5};
  std::size_t chains_ok = 0, chains = 0;
  RngStream rng(101, 0);
  for (std::size_t dim = 1; dim <= 3; ++dim) {
    const NetFamily family(NetKind::dyadic, dim, levels[dim]);
    const auto bound = static_cast<std::size_t>(std::lround(std::pow(3.0, static_cast<double>(dim)))) - 1;
    for (int n = 3; n <= levels[dim]; ++n) {
      const std::size_t kappa = max_neighbor_count(family, n);
      o.require(kappa == bound, "neighbor count N=" + std::to_string(dim) + " n=" + std::to_string(n));
    }
    o.detail << "kappa0(N=" << dim << ")=" << max_neighbor_count(family, 3) << " ";

    std::vector<double> s(dim), t(dim);
    for (int i = 0; i < 10000; ++i) {
      const int n = 1 + static_cast<int>(rng.uniform() * (levels[dim] - 1));
      const double r = std::ldexp(1.0, -n);
      for (std::size_t j = 0; j < dim; ++j) {
        s[j] = rng.uniform();
        t[j] = std::clamp(s[j] + r * (2.0 * rng.uniform() - 1.0), 0.0, 1.0);
      }
      ++chains;
      if (check_chain(build_chain(s, t, n, family), s, t, family).ok()) ++chains_ok;
    }
  }
  o.require(chains_ok == chains, "chain invariants");
  o.detail << "chains " << chains_ok << "/" << chains;
}

// --- 2: C_alpha --------------------------------------------------------------

void criterion_2(Outcome& o) {
  for (double alpha : {0.5, 1.0, 1.5}) {
    const CAlphaParts p = c_alpha_parts(alpha);
    const double diff = std::abs(p.c - p.c_quadrature);
    o.require(diff <= 1e-8, "closed form vs quadrature at alpha=" + std::to_string(alpha));
    o.detail << "alpha=" << alpha << " |diff|=" << diff << " ";
  }
  const double c1 = c_alpha(1.0);
  const double target = 2.0 / (std::numbers::pi * std::numbers::pi);
  o.require(std::abs(c1 - target) <= 1e-8, "C_1 = 2/pi^2");
  o.detail << "C_1=" << c1;
}

// --- 3: scale homogeneity ---------------------------------------------------

void criterion_3(Outcome& o) {
  struct Case {
    double alpha, hurst;
    std::size_t dim;
  };
  for (const Case& cs : {Case{1.5, 0.5, 1}, Case{1.2, 0.7, 2}}) {
    const double c = normalize_hfsm(cs.alpha, cs.hurst, cs.dim);
    const SpectralDensity sd = SpectralDensity::hfsm(cs.alpha, cs.hurst, cs.dim, c);
    double worst = 0.0;
    for (int k = 0; k <= 6; ++k) {
      std::vector<double> t(cs.dim, 0.0);
      t[0] = std::ldexp(1.0, -k);
      const double rel = std::abs(scale_param(sd, t) / std::pow(t[0], cs.hurst) - 1.0);
      worst = std::max(worst, rel);
    }
    o.require(worst <= 5e-3, "relative error for alpha=" + std::to_string(cs.alpha));
    o.detail << "(" << cs.alpha << "," << cs.hurst << "," << cs.dim << ") max rel err " << worst << " ";
  }
}

// --- 4: LePage marginal law -------------------------------------------------

void criterion_4(Outcome& o) {
  const FieldModel model = FieldModel::hfsm(1.5, 0.5, 1);
  PointSet point(1);
  point.push_back(std::vector<double>{1.0});
  SeriesBudget budget;
  budget.terms = 100000;
  budget.seed = 4;
  const auto reps = simulate_replicates(model, point, budget, 20000, kWorkers);
  std::vector<double> y;
  y.reserve(reps.size());
  for (const auto& r : reps) y.push_back(r[0]);
  RngStream oracle_stream(4, 1u << 30);
  const auto oracle = sas_oracle(1.5, 1.0, 200000, oracle_stream);
  const double ks = stats::ks_two_sample(y, oracle);
  o.require(ks <= 0.03, "KS <= 0.03");
  o.detail << "KS=" << ks << " (J=1e5, 2e4 replicates, oracle 2e5 draws)";
}

// --- 5: maximal moment index ------------------------------------------------

void criterion_5(Outcome& o) {
  MomentOptions opts;
  opts.replicates = 200;
  opts.seed = 5;
  opts.workers = kWorkers;

  const SequenceSpec pareto{SequenceKind::iid_pareto, 1.5, 0.5};
  const auto tp = theta_estimate(moment_curve(pareto, 0.75, geometric_grid(4, 16), opts), 1000, 5);
  o.require(tp.theta_hat >= 0.4 && tp.theta_hat <= 0.6, "pareto theta in [0.4, 0.6]");
  o.detail << "pareto theta=" << tp.theta_hat << " ";

  const SequenceSpec constant{SequenceKind::constant, 1.5, 0.5};
  const auto tc = theta_estimate(moment_curve(constant, 0.75, geometric_grid(4, 16), opts), 1000, 5);
  o.require(tc.theta_hat <= 0.02, "constant theta <= 0.02");
  o.detail << "constant theta=" << tc.theta_hat << " ";

  const SequenceSpec gauss{SequenceKind::iid_gaussian, 1.5, 0.5};
  MomentOptions block = opts;
  block.method = MaxMethod::block;
  const auto tg = theta_estimate(moment_curve(gauss, 1.0, geometric_grid(4, 24), block), 1000, 5);
  o.require(tg.theta_hat <= 0.05, "gaussian theta <= 0.05");
  o.detail << "gaussian theta=" << tg.theta_hat << " (n to 2^24) ";

  const auto g = gaussian_max_check(gauss, geometric_grid(8, 16), opts, 1.0, 2.0);
  o.require(g.upper_ok && g.lower_ok, "gaussian ratio in [1, 2]");
  o.detail << "ratio range [" << g.min_ratio << ", " << g.max_ratio << "]";
}

// --- 6: heavy-tail sandwich -------------------------------------------------

void criterion_6(Outcome& o) {
  MomentOptions opts;
  opts.replicates = 200;
  opts.seed = 6;
  opts.workers = kWorkers;
  const SequenceSpec pareto{SequenceKind::iid_pareto, 1.5, 0.5};
  const auto s = heavy_tail_bound_check(pareto, 0.75, 1.5, 0.1, geometric_grid(4, 16), opts);
  o.require(s.ok && std::isfinite(s.k9) && std::isfinite(s.k7) && s.k9 > 0.0, "finite sandwich constants");
  bool inside = true;
  for (std::size_t i = 0; i < s.n.size(); ++i)
    inside = inside && s.k9 * s.lower_envelope[i] <= s.m_hat[i] * (1 + 1e-12) &&
             s.m_hat[i] <= s.k7 * s.upper_envelope[i] * (1 + 1e-12);
  o.require(inside, "sandwich holds on the grid");
  o.detail << "K9=" << s.k9 << " K7=" << s.k7 << " slope=" << s.slope;
}

// --- 7: increment-maximum decay ---------------------------------------------

void criterion_7(Outcome& o) {
  const FieldModel model = FieldModel::hfsm(1.5, 0.5, 1);
  const NetFamily family(NetKind::dyadic, 1, 10);
  const NeighborCache cache(family, 3);
  SeriesBudget budget;
  budget.terms = 100000;
  budget.seed = 7;
  const std::size_t replicates = 200;
  const auto paths = simulate_paths(model, family, 3, budget, replicates, kWorkers);
  std::vector<double> lx, ly;
  for (int p = 4; p <= 10; ++p) {
    double sum = 0.0;
    for (const auto& path : paths) sum += increment_max_stat(cache, path, p, 0.5);
    lx.push_back(std::log(std::ldexp(1.0, -p)));
    ly.push_back(std::log(sum / static_cast<double>(replicates)));
  }
  const double slope = slope_of(lx, ly);
  o.require(slope >= 0.25 - 0.1 && slope <= 0.25 + 0.15, "slope in [0.15, 0.40]");
  o.detail << "slope=" << slope << " (target H*gamma=0.25)";
}

// --- 8: isotropic modulus trend ---------------------------------------------

void criterion_8(Outcome& o) {
  const FieldModel model = FieldModel::hfsm(1.5, 0.5, 1);
  const NetFamily family(NetKind::dyadic, 1, 14);
  const NeighborCache cache(family, 4);
  SeriesBudget budget;
  budget.terms = 50000;
  budget.seed = 8;
  const auto paths = simulate_paths(model, family, 4, budget, 50, kWorkers);
  ModulusSpec spec;
  spec.denominator = ModulusDenominator::harmonizable(0.5, 1.5, 0.5);
  spec.n_lo = 4;
  spec.n_hi = 10;
  const auto rep = modulus_ratio(cache, paths, spec);
  o.require(rep.nonincreasing, "medians nonincreasing");
  o.require(rep.final_below_initial, "final < initial");
  o.detail << "medians";
  for (double m : rep.median_ratio) o.detail << " " << m;
}

// --- 9: anisotropic modulus trend and operator scaling ----------------------

void criterion_9(Outcome& o) {
  const std::vector<double> hurst{0.4, 0.7};
  const FieldModel model = FieldModel::hfss(1.5, hurst);
  const NetFamily family(NetKind::dyadic, 2, 8);
  const NeighborCache cache(family, 2);
  SeriesBudget budget;
  budget.terms = 50000;
  budget.seed = 9;
  const auto paths = simulate_paths(model, family, 2, budget, 50, kWorkers);
  ModulusSpec spec;
  spec.mode = ModulusMode::anisotropic;
  spec.hurst = hurst;
  spec.denominator = ModulusDenominator::sheet(1.5, 0.5);
  spec.n_lo = 3;
  spec.n_hi = 7;
  const auto rep = modulus_ratio(cache, paths, spec);
  o.require(rep.nonincreasing, "anisotropic medians nonincreasing");
  o.require(rep.final_below_initial, "anisotropic final < initial");
  o.detail << "medians";
  for (double m : rep.median_ratio) o.detail << " " << m;

  // Z(Et) against prod b_j^{H_j} Z(t) with E = diag(1/2, 1/4).
  PointSet points(2);
  points.push_back(std::vector<double>{0.5, 0.5});
  points.push_back(std::vector<double>{0.25, 0.125});
  SeriesBudget oss = budget;
  oss.terms = 10000;
  oss.seed = 99;
  const auto reps = simulate_replicates(model, points, oss, 10000, kWorkers);
  const double factor = std::pow(0.5, hurst[0]) * std::pow(0.25, hurst[1]);
  std::vector<double> scaled, direct;
  for (const auto& r : reps) {
    direct.push_back(r[1]);
    scaled.push_back(factor * r[0]);
  }
  const double ks = stats::ks_two_sample(direct, scaled);
  o.require(ks <= 0.05, "operator scaling KS <= 0.05");
  o.detail << "; operator scaling KS=" << ks;
}

// --- 10: Riesz-Bessel asymptotic --------------------------------------------

void criterion_10(Outcome& o) {
  const double alpha = 1.5, gamma = 0.3, eta = 0.5;
  const double c = pitman_normalization(alpha, gamma, eta, 1);
  const SpectralDensity sd = SpectralDensity::riesz_bessel(alpha, gamma, eta, 1, c);
  std::vector<std::vector<double>> ts;
  for (int k = 4; k <= 10; ++k) ts.push_back({std::ldexp(1.0, -k)});
  const auto r = pitman_ratio(sd, ts);
  bool band = true;
  for (double v : r) band = band && v >= 0.8 && v <= 1.25;
  o.require(band, "ratios in [0.8, 1.25]");
  const std::size_t m = r.size();
  const bool toward_one = std::abs(r[m - 1] - 1.0) <= std::abs(r[m - 2] - 1.0) &&
                          std::abs(r[m - 2] - 1.0) <= std::abs(r[m - 3] - 1.0);
  const bool monotone = (r[m - 3] <= r[m - 2] && r[m - 2] <= r[m - 1]) ||
                        (r[m - 3] >= r[m - 2] && r[m - 2] >= r[m - 1]);
  o.require(monotone && toward_one, "last three monotone toward 1");
  o.detail << "exponent " << pitman_exponent(sd) << " ratios";
  for (double v : r) o.detail << " " << v;
}

// --- 11: brute-force equivalence --------------------------------------------

void criterion_11(Outcome& o) {
  struct Case {
    NetKind kind;
    std::size_t dim;
    int max_level;
    std::vector<double> exps;
  };
  const std::vector<Case> cases{{NetKind::dyadic, 1, 9, {}},
                                {NetKind::dyadic, 2, 4, {}},
                                {NetKind::dyadic, 3, 3, {}},
                                {NetKind::anisotropic, 2, 2, {0.5, 1.0}},
                                {NetKind::anisotropic, 2, 2, {0.4, 0.7}},
                                {NetKind::anisotropic, 1, 4, {0.5}}};
  std::size_t compared = 0, stat_mismatch = 0, neighbor_mismatch = 0;
  for (const Case& cs : cases) {
    const NetFamily family(cs.kind, cs.dim, cs.max_level, cs.exps);
    const bool sheet = cs.kind == NetKind::anisotropic && cs.dim > 1 &&
                       std::all_of(cs.exps.begin(), cs.exps.end(), [](double h) { return h < 1.0; });
    const FieldModel model = sheet ? FieldModel::hfss(1.5, cs.exps) : FieldModel::hfsm(1.5, 0.5, cs.dim);
    const NeighborCache cache(family, 1);
    SeriesBudget budget;
    budget.terms = 2000;
    budget.seed = 11;
    const auto paths = simulate_paths(model, family, 1, budget, 3, kWorkers);
    for (int p = 2; p <= cs.max_level; ++p) {
      const Net& coarse = family.level(p - 1);
      const Net& fine = family.level(p);
      if (fine.size() > 1000) continue;
      const double radius = coarse.radius();
      for (std::size_t i = 0; i < fine.size(); ++i) {
        const auto fp = fine.point(i);
        std::vector<std::size_t> scan;
        for (std::size_t k = 0; k < coarse.size(); ++k) {
          const auto cp = coarse.point(k);
          if (fp != cp && coarse.metric()(fp, cp) <= radius) scan.push_back(k);
        }
        if (scan != neighbors(coarse, fine, i)) ++neighbor_mismatch;
      }
      for (const auto& path : paths) {
        const auto& cv = path.at(p - 1);
        const auto& fv = path.at(p);
        double brute = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) {
          const auto fp = fine.point(i);
          for (std::size_t k = 0; k < coarse.size(); ++k) {
            const auto cp = coarse.point(k);
            if (fp == cp || coarse.metric()(fp, cp) > radius) continue;
            brute = std::max(brute, std::pow(std::abs(fv[i] - cv[k]), 0.5));
          }
        }
        ++compared;
        if (increment_max_stat(cache, path, p, 0.5) != brute) ++stat_mismatch;
      }
    }
  }
  o.require(stat_mismatch == 0, "increment_max_stat equals the all-pairs maximum");
  o.require(neighbor_mismatch == 0, "neighbor lists equal the distance scan");
  o.detail << compared << " statistics compared, " << stat_mismatch << " mismatches; " << neighbor_mismatch
           << " neighbor mismatches";
}

const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> kCriteria{
    {"net geometry", criterion_1},
    {"series constant C_alpha", criterion_2},
    {"scale-parameter homogeneity", criterion_3},
    {"LePage marginal law", criterion_4},
    {"maximal moment index", criterion_5},
    {"heavy-tail sandwich", criterion_6},
    {"increment-maximum decay", criterion_7},
    {"isotropic modulus trend", criterion_8},
    {"anisotropic modulus trend and operator scaling", criterion_9},
    {"Riesz-Bessel asymptotic", criterion_10},
    {"brute-force equivalence", criterion_11},
};

bool run(std::size_t index) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    kCriteria[index].second(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %zu (%s): %s in %.1fs | %s\n", index + 1, kCriteria[index].first.c_str(),
              o.pass ? "PASS" : "FAIL", secs, o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    constexpr std::string_view prefix = "--criterion=";
    if (arg.starts_with(prefix)) {
      const long n = std::strtol(std::string(arg.substr(prefix.size())).c_str(), nullptr, 10);
      if (n < 1 || n > static_cast<long>(kCriteria.size())) {
        std::fprintf(stderr, "criterion must be in 1..%zu\n", kCriteria.size());
        return 2;
      }
      selected.push_back(static_cast<std::size_t>(n - 1));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion=N]\n");
      return 2;
    }
  }
  if (selected.empty())
    for (std::size_t i = 0; i < kCriteria.size(); ++i) selected.push_back(i);
  bool all = true;
  for (std::size_t i : selected) all = run(i) && all;
  return all ? 0 : 1;
}
