#include "stablab/lepage.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "stablab/csv.hpp"
#include "stablab/error.hpp"
#include "stablab/parallel.hpp"
#include "stablab/stats.hpp"

namespace stablab {

// ---------------------------------------------------------------------------
// Constants

namespace {

void require_alpha(double alpha, const char* where) {
  if (!(alpha > 0.0 && alpha < 2.0))
    detail::fail_argument(std::string(where) + ": alpha = " + csv::to_string(alpha) +
                          " is outside the admissible interval (0, 2)");
}

double b_closed(double alpha) {
  if (alpha == 1.0) return std::numbers::pi / 2.0;
  return std::tgamma(1.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0);
}

// int_0^1 sin(t) t^{-alpha} dt with the t^{1-alpha} singularity split off,
// plus the Fourier tail over [1, inf) written as sine and cosine transforms.
double b_quadrature(double alpha) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double head =
      1.0 / (2.0 - alpha) + ts.integrate(
                                [alpha](double t) {
                                  if (t <= 0.0) return 0.0;
                                  return (std::sin(t) / t - 1.0) * std::pow(t, 1.0 - alpha);
                                },
                                0.0, 1.0, 1e-14);
  boost::math::quadrature::ooura_fourier_sin<double> fsin(1e-13);
  boost::math::quadrature::ooura_fourier_cos<double> fcos(1e-13);
  auto shifted = [alpha](double u) { return std::pow(1.0 + u, -alpha); };
  const double tail = std::cos(1.0) * fsin.integrate(shifted, 1.0).first +
                      std::sin(1.0) * fcos.integrate(shifted, 1.0).first;
  return head + tail;
}

}  // namespace

CAlphaParts c_alpha_parts(double alpha) {
  require_alpha(alpha, "c_alpha");
  CAlphaParts p;
  p.a = std::tgamma((alpha + 1.0) / 2.0) / (2.0 * std::sqrt(std::numbers::pi) * std::tgamma(alpha / 2.0 + 1.0));
  boost::math::quadrature::tanh_sinh<double> ts;
  p.a_quadrature =
      ts.integrate([alpha](double th) { return std::pow(std::cos(th), alpha); }, 0.0, std::numbers::pi / 2.0,
                   1e-14) /
      std::numbers::pi;
  p.b = b_closed(alpha);
  p.b_quadrature = b_quadrature(alpha);
  p.c = std::pow(p.a / p.b, 1.0 / alpha);
  p.c_quadrature = std::pow(p.a_quadrature / p.b_quadrature, 1.0 / alpha);
  return p;
}

double c_alpha(double alpha) {
  require_alpha(alpha, "c_alpha");
  const double a =
      std::tgamma((alpha + 1.0) / 2.0) / (2.0 * std::sqrt(std::numbers::pi) * std::tgamma(alpha / 2.0 + 1.0));
  return std::pow(a / b_closed(alpha), 1.0 / alpha);
}

double series_constant(double alpha) {
  require_alpha(alpha, "series_constant");
  return std::pow(b_closed(alpha), -1.0 / alpha);
}

// ---------------------------------------------------------------------------
// FieldModel

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::hfsm: return "hfsm";
    case KernelFamily::riesz_bessel: return "riesz_bessel";
    case KernelFamily::hfss: return "hfss";
  }
  return "unknown";
}

namespace {

double choose_beta(std::pair<double, double> window, const PhiChoice& choice) {
  const double beta = choice.beta.value_or(0.5 * (window.first + window.second));
  if (!(beta > window.first && beta < window.second))
    detail::fail_argument("phi.beta = " + csv::to_string(beta) + " is outside the admissible window (" +
                          csv::to_string(window.first) + ", " + csv::to_string(window.second) + ")");
  return beta;
}

std::complex<double> expm1i(double theta) {
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  return {-2.0 * s * s, 2.0 * s * c};
}

}  // namespace

FieldModel FieldModel::hfsm(double alpha, double hurst, std::size_t dim, std::optional<double> c, PhiChoice phi) {
  require_alpha(alpha, "hfsm");
  detail::require(dim >= 1, "hfsm: N must be >= 1");
  if (!(hurst > 0.0 && hurst < 1.0))
    detail::fail_argument("hfsm: H = " + csv::to_string(hurst) + " is outside the admissible interval (0, 1)");
  const double beta = choose_beta(beta_window_radial(alpha, hurst, dim), phi);
  FieldModel m(KernelFamily::hfsm, alpha, dim, PhiDensity::radial(dim, beta, phi.eta));
  m.hurst_ = hurst;
  m.density_c_ = c ? *c : normalize_hfsm(alpha, hurst, dim);
  m.log_c_ = std::log(m.density_c_);
  (void)SpectralDensity::hfsm(alpha, hurst, dim, m.density_c_);
  return m;
}

FieldModel FieldModel::riesz_bessel(double alpha, double gamma, double eta, std::size_t dim, double c,
                                    PhiChoice phi) {
  const auto sd = SpectralDensity::riesz_bessel(alpha, gamma, eta, dim, c);
  const double h = std::min(pitman_exponent(sd), 0.99);
  const double beta = choose_beta(beta_window_radial(alpha, h, dim), phi);
  FieldModel m(KernelFamily::riesz_bessel, alpha, dim, PhiDensity::radial(dim, beta, phi.eta));
  m.hurst_ = h;
  m.gamma_ = gamma;
  m.eta_ = eta;
  m.density_c_ = c;
  m.log_c_ = std::log(c);
  return m;
}

FieldModel FieldModel::hfss(double alpha, std::vector<double> hurst, PhiChoice phi) {
  require_alpha(alpha, "hfss");
  detail::require(!hurst.empty(), "hfss: at least one H_j is required");
  for (double h : hurst)
    if (!(h > 0.0 && h < 1.0))
      detail::fail_argument("hfss: H_j = " + csv::to_string(h) + " is outside the admissible interval (0, 1)");
  const double beta = choose_beta(beta_window_product(alpha, hurst), phi);
  const std::size_t dim = hurst.size();
  FieldModel m(KernelFamily::hfss, alpha, dim, PhiDensity::product(dim, beta, phi.eta));
  m.hurst_vec_ = std::move(hurst);
  return m;
}

FieldModel FieldModel::with_normalization(double value) const {
  if (!(value >= 0.0 && std::isfinite(value)))
    detail::fail_argument("model.normalization = " + csv::to_string(value) + " must be a finite value >= 0");
  FieldModel m = *this;
  m.normalization_ = value;
  m.log_normalization_ = std::log(value);
  return m;
}

SpectralDensity FieldModel::spectral() const {
  switch (family_) {
    case KernelFamily::hfsm: return SpectralDensity::hfsm(alpha_, hurst_, dim_, density_c_);
    case KernelFamily::riesz_bessel: return SpectralDensity::riesz_bessel(alpha_, gamma_, eta_, dim_, density_c_);
    case KernelFamily::hfss: break;
  }
  detail::fail_argument("FieldModel: hfss has no radial spectral density");
}

std::complex<double> FieldModel::kernel(std::span<const double> t, std::span<const double> x) const {
  detail::require(t.size() == dim_ && x.size() == dim_, "kernel_eval: dimension mismatch");
  std::array<double, 16> log_abs_buf{};
  std::vector<double> log_abs_heap;
  std::span<double> log_abs;
  if (dim_ <= log_abs_buf.size()) {
    log_abs = std::span<double>(log_abs_buf.data(), dim_);
  } else {
    log_abs_heap.resize(dim_);
    log_abs = log_abs_heap;
  }
  bool any_zero = false, all_zero = true;
  for (std::size_t j = 0; j < dim_; ++j) {
    any_zero = any_zero || x[j] == 0.0;
    all_zero = all_zero && x[j] == 0.0;
    log_abs[j] = std::log(std::abs(x[j]));
  }
  if (family_ == KernelFamily::hfss) {
    if (any_zero) detail::fail_argument("kernel_eval: hfss kernel is singular when some x_j = 0");
    std::complex<double> k = 1.0;
    for (std::size_t j = 0; j < dim_; ++j) k *= expm1i(t[j] * x[j]);
    return k * std::exp(log_kernel_weight(log_abs));
  }
  if (all_zero) detail::fail_argument("kernel_eval: kernel is singular at x = 0");
  double theta = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) theta += t[j] * x[j];
  return expm1i(theta) * std::exp(log_kernel_weight(log_abs));
}

double FieldModel::log_kernel_weight(std::span<const double> log_abs) const {
  if (family_ == KernelFamily::hfss) {
    double s = log_normalization_;
    for (std::size_t j = 0; j < dim_; ++j) s -= (hurst_vec_[j] + 1.0 / alpha_) * log_abs[j];
    return s;
  }
  double log_r = log_abs[0];
  if (dim_ > 1) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : log_abs) m = std::max(m, v);
    double acc = 0.0;
    for (double v : log_abs) acc += std::exp(2.0 * (v - m));
    log_r = m + 0.5 * std::log(acc);
  }
  double log_f;
  const double n = static_cast<double>(dim_);
  if (family_ == KernelFamily::hfsm) {
    log_f = log_c_ - (alpha_ * hurst_ + n) * log_r;
  } else {
    const double log1pr2 =
        log_r > 0.0 ? 2.0 * log_r + std::log1p(std::exp(-2.0 * log_r)) : std::log1p(std::exp(2.0 * log_r));
    log_f = log_c_ - 2.0 * gamma_ * log_r - eta_ * log1pr2;
  }
  return log_normalization_ + log_f / alpha_;
}

std::string FieldModel::canonical() const {
  std::string s = "family=";
  s += to_string(family_);
  s += ";alpha=";
  csv::append(s, alpha_);
  s += ";N=" + std::to_string(dim_);
  switch (family_) {
    case KernelFamily::hfsm:
      s += ";H=";
      csv::append(s, hurst_);
      break;
    case KernelFamily::riesz_bessel:
      s += ";gamma=";
      csv::append(s, gamma_);
      s += ";eta=";
      csv::append(s, eta_);
      break;
    case KernelFamily::hfss:
      s += ";H=";
      for (std::size_t j = 0; j < hurst_vec_.size(); ++j) {
        if (j) s += ',';
        csv::append(s, hurst_vec_[j]);
      }
      break;
  }
  s += ";c=";
  csv::append(s, density_c_);
  s += ";normalization=";
  csv::append(s, normalization_);
  s += phi_.form() == PhiForm::radial ? ";phi=radial" : ";phi=product";
  s += ";beta=";
  csv::append(s, phi_.beta());
  s += ";phi_eta=";
  csv::append(s, phi_.eta());
  return s;
}

std::uint64_t FieldModel::hash() const { return fnv1a64(canonical()); }

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void validate(const SeriesBudget& budget) {
  detail::require(budget.terms >= 1, "budget.terms = 0; J must be >= 1");
  if (!(budget.tolerance > 0.0)) detail::fail_argument("budget.tolerance must be positive");
  if (budget.constant_override && !(std::isfinite(*budget.constant_override)))
    detail::fail_argument("budget: constant override must be finite");
}

// ---------------------------------------------------------------------------
// Series engine

namespace {

constexpr std::size_t kBatch = 512;
// Terms whose importance point lies beyond e^700 carry weight below e^{-700 H}
// and cannot be represented; they are dropped.
constexpr double kMaxLogAbs = 700.0;

struct TermBatch {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> coef_re, coef_im;  // C Gamma^{-1/alpha} w(xi) g
  std::vector<double> xi;                // count * dim
  std::vector<unsigned char> active;
};

class TermSource {
 public:
  TermSource(const FieldModel& model, const SeriesBudget& budget)
      : model_(model),
        gamma_stream_(budget.seed, budget.stream_id, 0),
        xi_stream_(budget.seed, budget.stream_id, 1),
        g_stream_(budget.seed, budget.stream_id, 2),
        constant_(budget.constant_override.value_or(series_constant(model.alpha()))),
        sigma_(gaussian_sigma(model.alpha())),
        inv_alpha_(1.0 / model.alpha()),
        log_abs_(model.dim()) {}

  void fill(TermBatch& batch, std::size_t count) {
    const std::size_t dim = model_.dim();
    batch.count = count;
    batch.dim = dim;
    batch.coef_re.resize(count);
    batch.coef_im.resize(count);
    batch.xi.resize(count * dim);
    batch.active.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      gamma_ += gamma_stream_.exponential();
      std::span<double> x(batch.xi.data() + i * dim, dim);
      const PhiSample s = model_.phi().sample(xi_stream_, x, log_abs_);
      const auto [z1, z2] = g_stream_.normal_pair();
      bool finite = true;
      for (double v : log_abs_) finite = finite && v < kMaxLogAbs;
      const double log_amp =
          -inv_alpha_ * std::log(gamma_) + model_.log_kernel_weight(log_abs_) - inv_alpha_ * s.log_phi;
      const double amp = constant_ * std::exp(log_amp);
      if (!finite || amp == 0.0) {
        batch.active[i] = 0;
        batch.coef_re[i] = batch.coef_im[i] = 0.0;
        std::fill(x.begin(), x.end(), 0.0);
        continue;
      }
      batch.active[i] = 1;
      batch.coef_re[i] = amp * sigma_ * z1;
      batch.coef_im[i] = amp * sigma_ * z2;
    }
  }

 private:
  const FieldModel& model_;
  RngStream gamma_stream_, xi_stream_, g_stream_;
  double constant_;
  double sigma_;
  double inv_alpha_;
  double gamma_ = 0.0;
  std::vector<double> log_abs_;
};

// Arbitrary points: one sincos per (term, point).
class PointEvaluator {
 public:
  PointEvaluator(const FieldModel& model, const PointSet& points)
      : sheet_(model.family() == KernelFamily::hfss), points_(points), values_(points.size(), 0.0) {}

  void apply(const TermBatch& b) {
    const std::size_t dim = b.dim;
    for (std::size_t i = 0; i < b.count; ++i) {
      if (!b.active[i]) continue;
      const double* x = b.xi.data() + i * dim;
      const double cr = b.coef_re[i], ci = b.coef_im[i];
      for (std::size_t p = 0; p < points_.size(); ++p) {
        const auto t = points_[p];
        std::complex<double> k;
        if (sheet_) {
          k = 1.0;
          for (std::size_t j = 0; j < dim; ++j) k *= expm1i(t[j] * x[j]);
        } else {
          double theta = 0.0;
          for (std::size_t j = 0; j < dim; ++j) theta += t[j] * x[j];
          k = expm1i(theta);
        }
        values_[p] += cr * k.real() - ci * k.imag();
      }
    }
  }

  const std::vector<double>& values() const { return values_; }

 private:
  bool sheet_;
  const PointSet& points_;
  std::vector<double> values_;
};

// Cartesian lattice t = (k_1 f_1, ..., k_N f_N), 1 <= k_j <= K_j. Per axis the
// factors e^{i k f xi} - 1 follow d_{k+1} = d_k w + (w - 1), re-anchored
// every 64 steps.
class LatticeEvaluator {
 public:
  LatticeEvaluator(const FieldModel& model, const Net& net)
      : sheet_(model.family() == KernelFamily::hfss), dim_(net.dim()), values_(net.size(), 0.0) {
    for (std::size_t j = 0; j < dim_; ++j) {
      counts_.push_back(net.axis_counts()[j]);
      spacing_.push_back(net.spacing(j));
    }
    dre_.resize(dim_);
    dim_im_.resize(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      dre_[j].resize(counts_[j]);
      dim_im_[j].resize(counts_[j]);
    }
  }

  void apply(const TermBatch& b) {
    for (std::size_t i = 0; i < b.count; ++i) {
      if (!b.active[i]) continue;
      const double* x = b.xi.data() + i * dim_;
      for (std::size_t j = 0; j < dim_; ++j) fill_axis(j, spacing_[j] * x[j]);
      accumulate({b.coef_re[i], b.coef_im[i]});
    }
  }

  const std::vector<double>& values() const { return values_; }

 private:
  void fill_axis(std::size_t j, double a) {
    auto& re = dre_[j];
    auto& im = dim_im_[j];
    const std::size_t count = counts_[j];
    const std::complex<double> w1 = expm1i(a);  // w - 1
    const double wr = 1.0 + w1.real(), wi = w1.imag();
    for (std::size_t k0 = 0; k0 < count; k0 += 64) {
      const std::complex<double> anchor = expm1i(static_cast<double>(k0 + 1) * a);
      double r = anchor.real(), m = anchor.imag();
      re[k0] = r;
      im[k0] = m;
      const std::size_t end = std::min(count, k0 + 64);
      for (std::size_t k = k0 + 1; k < end; ++k) {
        const double nr = r * wr - m * wi + w1.real();
        const double nm = r * wi + m * wr + w1.imag();
        r = nr;
        m = nm;
        re[k] = r;
        im[k] = m;
      }
    }
  }

  void accumulate(std::complex<double> coef) {
    const std::size_t last = dim_ - 1;
    const std::size_t inner = counts_[last];
    const double* lre = dre_[last].data();
    const double* lim = dim_im_[last].data();
    std::vector<std::size_t> k(last, 0);
    // prefix[m]: e^{i sum_{j<m} theta_j} - 1 (motion) or prod_{j<m} d_j (sheet).
    std::vector<std::complex<double>> prefix(dim_, sheet_ ? std::complex<double>(1.0) : std::complex<double>(0.0));
    auto rebuild = [&](std::size_t from) {
      for (std::size_t m = from; m < last; ++m) {
        const std::complex<double> d(dre_[m][k[m]], dim_im_[m][k[m]]);
        prefix[m + 1] = sheet_ ? prefix[m] * d : prefix[m] + d * (1.0 + prefix[m]);
      }
    };
    rebuild(0);
    double* out = values_.data();
    for (;;) {
      const std::complex<double> p = prefix[last];
      double base;
      std::complex<double> q;
      if (sheet_) {
        base = 0.0;
        q = coef * p;
      } else {
        base = (coef * p).real();
        q = coef * (1.0 + p);
      }
      const double qr = q.real(), qi = q.imag();
      for (std::size_t kk = 0; kk < inner; ++kk) out[kk] += base + qr * lre[kk] - qi * lim[kk];
      out += inner;
      std::size_t m = last;
      while (m-- > 0) {
        if (++k[m] < counts_[m]) break;
        k[m] = 0;
      }
      if (m == static_cast<std::size_t>(-1)) return;
      rebuild(m);
    }
  }

  bool sheet_;
  std::size_t dim_;
  std::vector<std::size_t> counts_;
  std::vector<double> spacing_;
  std::vector<std::vector<double>> dre_, dim_im_;
  std::vector<double> values_;
};

template <class Evaluators, class Snapshot>
void run_series(const FieldModel& model, const SeriesBudget& budget, Evaluators& evaluators,
                const std::vector<std::size_t>& snapshots, Snapshot&& on_snapshot) {
  TermSource source(model, budget);
  TermBatch batch;
  std::size_t produced = 0;
  std::size_t next_snapshot = 0;
  while (produced < budget.terms) {
    std::size_t count = std::min(kBatch, budget.terms - produced);
    if (next_snapshot < snapshots.size()) count = std::min(count, snapshots[next_snapshot] - produced);
    source.fill(batch, count);
    for (auto& e : evaluators) e.apply(batch);
    produced += count;
    while (next_snapshot < snapshots.size() && snapshots[next_snapshot] == produced) on_snapshot(next_snapshot++);
  }
}

void require_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x))
      throw RuntimeError("simulate_path: non-finite partial sum (importance density does not match the kernel)");
}

}  // namespace

PathSample simulate_path(const FieldModel& model, const PointSet& grid, const SeriesBudget& budget) {
  validate(budget);
  detail::require(!grid.empty(), "simulate_path: grid is empty");
  detail::require(grid.dim() == model.dim(), "simulate_path: grid dimension differs from the model dimension");
  PathSample out;
  out.model_hash = model.hash();
  out.budget = budget;
  out.grid = sorted_unique(grid);
  std::vector<PointEvaluator> ev;
  ev.emplace_back(model, out.grid);
  run_series(model, budget, ev, {}, [](std::size_t) {});
  out.values = ev.front().values();
  require_finite(out.values);
  return out;
}

PathSample simulate_net(const FieldModel& model, const Net& net, const SeriesBudget& budget) {
  validate(budget);
  detail::require(net.dim() == model.dim(), "simulate_net: net dimension differs from the model dimension");
  PathSample out;
  out.model_hash = model.hash();
  out.budget = budget;
  out.grid = net.points();
  std::vector<LatticeEvaluator> ev;
  ev.emplace_back(model, net);
  run_series(model, budget, ev, {}, [](std::size_t) {});
  out.values = ev.front().values();
  require_finite(out.values);
  return out;
}

std::vector<std::vector<double>> simulate_family(const FieldModel& model, const NetFamily& family, int min_level,
                                                 const SeriesBudget& budget) {
  validate(budget);
  detail::require(family.dim() == model.dim(), "simulate_family: dimension mismatch");
  detail::require(min_level >= 1 && min_level <= family.max_level(), "simulate_family: min_level out of range");
  const int top = family.max_level();
  std::vector<std::vector<double>> out;
  if (family.kind() == NetKind::dyadic) {
    const Net& finest = family.level(top);
    std::vector<LatticeEvaluator> ev;
    ev.emplace_back(model, finest);
    run_series(model, budget, ev, {}, [](std::size_t) {});
    const auto& fine = ev.front().values();
    require_finite(fine);
    for (int p = min_level; p <= top; ++p) {
      const Net& net = family.level(p);
      const std::size_t stride = std::size_t{1} << (top - p);
      std::vector<double> v(net.size());
      for (std::size_t i = 0; i < net.size(); ++i) {
        const auto k = net.multi_index(i);
        std::size_t flat = 0;
        for (std::size_t j = 0; j < net.dim(); ++j) flat = flat * finest.axis_counts()[j] + (k[j] * stride - 1);
        v[i] = fine[flat];
      }
      out.push_back(std::move(v));
    }
    return out;
  }
  std::vector<LatticeEvaluator> ev;
  for (int p = min_level; p <= top; ++p) ev.emplace_back(model, family.level(p));
  run_series(model, budget, ev, {}, [](std::size_t) {});
  for (auto& e : ev) {
    require_finite(e.values());
    out.push_back(e.values());
  }
  return out;
}

std::vector<std::vector<double>> simulate_replicates(const FieldModel& model, const PointSet& points,
                                                     const SeriesBudget& budget, std::size_t replicates,
                                                     std::size_t workers) {
  validate(budget);
  detail::require(!points.empty() && points.dim() == model.dim(), "simulate_replicates: bad point set");
  std::vector<std::vector<double>> out(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    SeriesBudget b = budget;
    b.stream_id = budget.stream_id + r;
    std::vector<PointEvaluator> ev;
    ev.emplace_back(model, points);
    run_series(model, b, ev, {}, [](std::size_t) {});
    require_finite(ev.front().values());
    out[r] = ev.front().values();
  });
  return out;
}

TruncationTable truncation_diagnostic(const FieldModel& model, const PointSet& grid,
                                      const std::vector<std::size_t>& terms, std::size_t replicates,
                                      const SeriesBudget& budget, std::size_t workers) {
  detail::require(terms.size() >= 2, "truncation_diagnostic: at least two J values are required");
  detail::require(terms.front() >= 1 && std::is_sorted(terms.begin(), terms.end()) &&
                      std::adjacent_find(terms.begin(), terms.end()) == terms.end(),
                  "truncation_diagnostic: J list must be strictly increasing");
  detail::require(replicates >= 1, "truncation_diagnostic: replicates must be >= 1");
  const PointSet points = sorted_unique(grid);
  TruncationTable table;
  table.terms = terms;
  table.deltas.assign(replicates, std::vector<double>(terms.size() - 1, 0.0));
  std::vector<std::vector<double>> sups(replicates, std::vector<double>(terms.size(), 0.0));
  parallel_for(replicates, workers, [&](std::size_t r) {
    SeriesBudget b = budget;
    b.terms = terms.back();
    b.stream_id = budget.stream_id + r;
    validate(b);
    std::vector<PointEvaluator> ev;
    ev.emplace_back(model, points);
    std::vector<double> previous;
    run_series(model, b, ev, terms, [&](std::size_t idx) {
      const auto& v = ev.front().values();
      require_finite(v);
      double sup = 0.0;
      for (double x : v) sup = std::max(sup, std::abs(x));
      sups[r][idx] = sup;
      if (idx > 0) {
        double d = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) d = std::max(d, std::abs(v[i] - previous[i]));
        table.deltas[r][idx - 1] = d;
      }
      previous = v;
    });
  });
  std::vector<double> column(replicates);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t r = 0; r < replicates; ++r) column[r] = sups[r][i];
    table.median_sup.push_back(stats::median(column));
  }
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
    for (std::size_t r = 0; r < replicates; ++r) column[r] = table.deltas[r][i];
    table.median_delta.push_back(stats::median(column));
    const double denom = table.median_sup[i + 1];
    table.relative_delta.push_back(denom > 0.0 ? table.median_delta.back() / denom : 0.0);
    for (std::size_t r = 0; r < replicates; ++r) {
      const double base = sups[r][i];
      column[r] = base > 0.0 ? std::abs(sups[r][i + 1] - base) / base : 0.0;
    }
    table.median_sup_change.push_back(stats::median(column));
  }
  table.nonincreasing = true;
  for (std::size_t i = 1; i < table.median_delta.size(); ++i)
    if (table.median_delta[i] > table.median_delta[i - 1]) table.nonincreasing = false;
  return table;
}

// ---------------------------------------------------------------------------
// Export

void write_path_csv(std::ostream& os, const PathSample& path) {
  std::string line;
  const std::size_t dim = path.grid.dim();
  for (std::size_t j = 0; j < dim; ++j) line += "t" + std::to_string(j + 1) + ",";
  line += "value\n";
  os << line;
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    line.clear();
    for (double v : path.grid[i]) {
      csv::append(line, v);
      line += ',';
    }
    csv::append(line, path.values[i]);
    line += '\n';
    os << line;
  }
}

namespace {

constexpr char kMagic[8] = {'S', 'T', 'B', 'L', 'P', 'A', 'T', 'H'};
constexpr std::uint32_t kBinaryVersion = 1;

template <class U>
void put_le(std::ostream& os, U v) {
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <class U>
U get_le(std::istream& is) {
  unsigned char buf[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(U))) throw RuntimeError("read_path_binary: truncated input");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void write_path_binary(std::ostream& os, const PathSample& path) {
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kBinaryVersion);
  put_le<std::uint64_t>(os, path.model_hash);
  put_le<std::uint64_t>(os, path.budget.terms);
  put_le<std::uint64_t>(os, path.budget.seed);
  put_le<std::uint64_t>(os, path.budget.stream_id);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(path.grid.dim()));
  put_le<std::uint64_t>(os, path.values.size());
  for (double c : path.grid.coords()) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(c));
  for (double v : path.values) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
}

PathSample read_path_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw RuntimeError("read_path_binary: bad magic");
  if (get_le<std::uint32_t>(is) != kBinaryVersion) throw RuntimeError("read_path_binary: unsupported version");
  PathSample p;
  p.model_hash = get_le<std::uint64_t>(is);
  p.budget.terms = get_le<std::uint64_t>(is);
  p.budget.seed = get_le<std::uint64_t>(is);
  p.budget.stream_id = get_le<std::uint64_t>(is);
  const std::uint32_t dim = get_le<std::uint32_t>(is);
  const std::uint64_t count = get_le<std::uint64_t>(is);
  if (dim == 0) throw RuntimeError("read_path_binary: zero dimension");
  std::vector<double> coords(count * dim);
  for (auto& c : coords) c = std::bit_cast<double>(get_le<std::uint64_t>(is));
  p.grid = PointSet(dim, std::move(coords));
  p.values.resize(count);
  for (auto& v : p.values) v = std::bit_cast<double>(get_le<std::uint64_t>(is));
  return p;
}

}  // namespace stablab
