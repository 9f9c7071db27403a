#include "stablab/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "stablab/csv.hpp"
#include "stablab/error.hpp"

namespace stablab {

PointSet sorted_unique(const PointSet& points) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto less = [&](std::size_t a, std::size_t b) {
    auto pa = points[a];
    auto pb = points[b];
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::stable_sort(order.begin(), order.end(), less);
  PointSet out(points.dim());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      auto prev = points[order[i - 1]];
      auto cur = points[order[i]];
      if (std::equal(prev.begin(), prev.end(), cur.begin())) continue;
    }
    out.push_back(points[order[i]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// AnisoMetric

AnisoMetric::AnisoMetric(std::vector<double> exponents) : exponents_(std::move(exponents)) {
  detail::require(!exponents_.empty(), "AnisoMetric: at least one exponent is required");
  for (double h : exponents_) {
    if (!(h > 0.0 && h <= 1.0)) {
      detail::fail_argument("AnisoMetric: exponent " + csv::to_string(h) + " is outside (0, 1]");
    }
  }
}

AnisoMetric AnisoMetric::linf(std::size_t dim) {
  detail::require(dim >= 1, "AnisoMetric: dimension must be >= 1");
  return AnisoMetric(std::vector<double>(dim, 1.0));
}

double AnisoMetric::q() const noexcept {
  double q = 0.0;
  for (double h : exponents_) q += 1.0 / h;
  return q;
}

bool AnisoMetric::is_linf() const noexcept {
  return std::all_of(exponents_.begin(), exponents_.end(), [](double h) { return h == 1.0; });
}

double AnisoMetric::component(std::size_t axis, double a, double b) const noexcept {
  const double d = std::abs(a - b);
  const double h = exponents_[axis];
  return h == 1.0 ? d : std::pow(d, h);
}

double AnisoMetric::operator()(std::span<const double> s, std::span<const double> t) const {
  detail::require(s.size() == dim() && t.size() == dim(), "rho: dimension mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) m = std::max(m, component(j, s[j], t[j]));
  return m;
}

double rho(std::span<const double> s, std::span<const double> t, const AnisoMetric& metric) {
  return metric(s, t);
}

const char* to_string(NetKind kind) { return kind == NetKind::dyadic ? "dyadic" : "anisotropic"; }

// ---------------------------------------------------------------------------
// Net

int max_dyadic_level(std::size_t dim) {
  switch (dim) {
    case 1: return 20;
    case 2: return 12;
    case 3: return 8;
    default: return std::max(1, static_cast<int>(24 / dim));
  }
}

Net build_net(NetKind kind, std::size_t dim, int level, std::vector<double> exponents) {
  detail::require(dim >= 1, "build_net: dimension N must be >= 1");
  detail::require(level >= 1, "build_net: level n must be >= 1");
  if (kind == NetKind::dyadic) {
    detail::require(level <= max_dyadic_level(dim),
                    "build_net: dyadic level " + std::to_string(level) + " exceeds the stored maximum " +
                        std::to_string(max_dyadic_level(dim)) + " for N=" + std::to_string(dim));
    Net net(kind, level, AnisoMetric::linf(dim));
    net.counts_.assign(dim, std::uint32_t{1} << level);
    net.spacing_.assign(dim, std::ldexp(1.0, -level));
    net.size_ = std::size_t{1} << (level * dim);
    return net;
  }
  detail::require(exponents.size() == dim, "build_net: anisotropic nets need one exponent per dimension");
  AnisoMetric metric(std::move(exponents));
  Net net(kind, level, metric);
  std::size_t size = 1;
  for (std::size_t j = 0; j < dim; ++j) {
    const double scaled = static_cast<double>(level) / metric.exponents()[j];
    const double count = std::floor(std::exp2(scaled));
    detail::require(count <= static_cast<double>(kMaxNetPoints),
                    "build_net: anisotropic level " + std::to_string(level) + " exceeds the point ceiling");
    net.counts_.push_back(static_cast<std::uint32_t>(count));
    net.spacing_.push_back(std::exp2(-scaled));
    size *= net.counts_.back();
    detail::require(size <= kMaxNetPoints,
                    "build_net: anisotropic level " + std::to_string(level) + " exceeds the point ceiling");
  }
  net.size_ = size;
  return net;
}

double Net::coordinate(std::size_t axis, std::uint32_t k) const {
  if (kind_ == NetKind::dyadic) return std::ldexp(static_cast<double>(k), -level_);
  return static_cast<double>(k) * spacing_[axis];
}

double Net::radius() const noexcept { return std::ldexp(1.0, -level_); }

std::vector<std::uint32_t> Net::multi_index(std::size_t flat) const {
  std::vector<std::uint32_t> k(dim());
  for (std::size_t j = dim(); j-- > 0;) {
    k[j] = static_cast<std::uint32_t>(flat % counts_[j]) + 1;
    flat /= counts_[j];
  }
  return k;
}

std::size_t Net::flat_index(std::span<const std::uint32_t> k) const {
  std::size_t flat = 0;
  for (std::size_t j = 0; j < dim(); ++j) flat = flat * counts_[j] + (k[j] - 1);
  return flat;
}

void Net::point_into(std::size_t flat, std::span<double> out) const {
  for (std::size_t j = dim(); j-- > 0;) {
    out[j] = coordinate(j, static_cast<std::uint32_t>(flat % counts_[j]) + 1);
    flat /= counts_[j];
  }
}

std::vector<double> Net::point(std::size_t flat) const {
  std::vector<double> p(dim());
  point_into(flat, p);
  return p;
}

PointSet Net::points() const {
  std::vector<double> coords(size_ * dim());
  for (std::size_t i = 0; i < size_; ++i) point_into(i, {coords.data() + i * dim(), dim()});
  return PointSet(dim(), std::move(coords));
}

std::uint32_t Net::nearest_axis_index(std::size_t axis, double x) const {
  const double v = x / spacing_[axis];
  const double count = counts_[axis];
  double guess = std::ceil(v - 0.5);
  guess = std::clamp(guess, 1.0, count);
  auto k0 = static_cast<std::uint32_t>(guess);
  std::uint32_t best = k0;
  double best_d = std::abs(coordinate(axis, k0) - x);
  const std::uint32_t lo = k0 > 1 ? k0 - 1 : 1;
  const std::uint32_t hi = std::min<std::uint32_t>(k0 + 1, counts_[axis]);
  for (std::uint32_t k = lo; k <= hi; ++k) {
    const double d = std::abs(coordinate(axis, k) - x);
    if (d < best_d || (d == best_d && k < best)) {
      best = k;
      best_d = d;
    }
  }
  return best;
}

std::size_t Net::nearest(std::span<const double> x) const {
  detail::require(x.size() == dim(), "Net::nearest: dimension mismatch");
  std::vector<std::uint32_t> k(dim());
  for (std::size_t j = 0; j < dim(); ++j) k[j] = nearest_axis_index(j, x[j]);
  return flat_index(k);
}

// ---------------------------------------------------------------------------
// Neighbors

namespace {

struct AxisCandidate {
  std::uint32_t index;
  bool coincident;
};

void check_pair(const Net& coarse, const Net& fine) {
  detail::require(coarse.level() + 1 == fine.level(),
                  "neighbors: coarse net level must be one below the fine net level");
  detail::require(coarse.kind() == fine.kind() && coarse.dim() == fine.dim() && coarse.metric() == fine.metric(),
                  "neighbors: nets differ in kind, dimension, or metric");
}

// Coarse indices along `axis` within the coarse radius of fine index k.
std::vector<AxisCandidate> axis_candidates(const Net& coarse, const Net& fine, std::size_t axis, std::uint32_t k) {
  const double x = fine.coordinate(axis, k);
  const double thr = coarse.radius();
  const double v = x / coarse.spacing(axis);
  const double count = coarse.axis_counts()[axis];
  const auto lo = static_cast<std::uint32_t>(std::clamp(std::floor(v) - 2.0, 1.0, count));
  const auto hi = static_cast<std::uint32_t>(std::clamp(std::ceil(v) + 2.0, 1.0, count));
  std::vector<AxisCandidate> out;
  for (std::uint32_t kc = lo; kc <= hi; ++kc) {
    const double y = coarse.coordinate(axis, kc);
    if (coarse.metric().component(axis, x, y) <= thr) out.push_back({kc, y == x});
  }
  return out;
}

template <class Emit>
void enumerate_product(const std::vector<std::vector<AxisCandidate>>& lists, const Net& coarse, NeighborMode mode,
                       Emit&& emit) {
  const std::size_t dim = lists.size();
  for (const auto& l : lists)
    if (l.empty()) return;
  std::vector<std::size_t> pos(dim, 0);
  for (;;) {
    std::size_t flat = 0;
    bool all_coincident = true;
    for (std::size_t j = 0; j < dim; ++j) {
      const auto& c = lists[j][pos[j]];
      flat = flat * coarse.axis_counts()[j] + (c.index - 1);
      all_coincident = all_coincident && c.coincident;
    }
    if (!(all_coincident && mode == NeighborMode::proper)) emit(flat);
    std::size_t j = dim;
    while (j-- > 0) {
      if (++pos[j] < lists[j].size()) break;
      pos[j] = 0;
      if (j == 0) return;
    }
  }
}

}  // namespace

std::vector<std::size_t> neighbors(const Net& coarse, const Net& fine, std::size_t fine_index, NeighborMode mode) {
  check_pair(coarse, fine);
  detail::require(fine_index < fine.size(), "neighbors: point index out of range");
  const auto k = fine.multi_index(fine_index);
  std::vector<std::vector<AxisCandidate>> lists(fine.dim());
  for (std::size_t j = 0; j < fine.dim(); ++j) lists[j] = axis_candidates(coarse, fine, j, k[j]);
  std::vector<std::size_t> out;
  enumerate_product(lists, coarse, mode, [&](std::size_t flat) { out.push_back(flat); });
  return out;
}

std::size_t NeighborTable::max_degree() const {
  std::size_t m = 0;
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) m = std::max(m, offsets[i + 1] - offsets[i]);
  return m;
}

NeighborTable build_neighbor_table(const Net& coarse, const Net& fine) {
  check_pair(coarse, fine);
  const std::size_t dim = fine.dim();
  // Per-axis candidate lists depend only on the axis index, so build them once.
  std::vector<std::vector<std::vector<AxisCandidate>>> per_axis(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const std::uint32_t count = fine.axis_counts()[j];
    per_axis[j].resize(count);
    for (std::uint32_t k = 1; k <= count; ++k) per_axis[j][k - 1] = axis_candidates(coarse, fine, j, k);
  }
  NeighborTable table;
  table.offsets.reserve(fine.size() + 1);
  table.offsets.push_back(0);
  std::vector<std::vector<AxisCandidate>> lists(dim);
  std::vector<std::uint32_t> k(dim, 1);
  for (std::size_t flat = 0; flat < fine.size(); ++flat) {
    for (std::size_t j = 0; j < dim; ++j) lists[j] = per_axis[j][k[j] - 1];
    enumerate_product(lists, coarse, NeighborMode::proper,
                      [&](std::size_t c) { table.indices.push_back(static_cast<std::uint32_t>(c)); });
    table.offsets.push_back(table.indices.size());
    for (std::size_t j = dim; j-- > 0;) {
      if (++k[j] <= fine.axis_counts()[j]) break;
      k[j] = 1;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// NetFamily and chains

NetFamily::NetFamily(NetKind kind, std::size_t dim, int max_level, std::vector<double> exponents)
    : kind_(kind), dim_(dim) {
  detail::require(max_level >= 1, "NetFamily: max level must be >= 1");
  nets_.reserve(static_cast<std::size_t>(max_level));
  for (int n = 1; n <= max_level; ++n) nets_.push_back(build_net(kind, dim, n, exponents));
  if (kind == NetKind::dyadic) {
    nested_ = true;
  } else {
    nested_ = std::all_of(exponents.begin(), exponents.end(), [](double h) {
      const double inv = 1.0 / h;
      return inv == std::round(inv);
    });
  }
}

const Net& NetFamily::level(int n) const {
  detail::require(n >= 1 && n <= max_level(),
                  "NetFamily: level " + std::to_string(n) + " is outside 1.." + std::to_string(max_level()));
  return nets_[static_cast<std::size_t>(n - 1)];
}

namespace {

bool in_unit_cube(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

// One chain step: a point of `next` within next.radius() of the target and
// within prev_radius of the previous step, nearest the target per axis.
void guided_step(const Net& next, std::span<const double> previous, std::span<const double> target,
                 double prev_radius, std::span<double> out) {
  const AnisoMetric& metric = next.metric();
  for (std::size_t j = 0; j < next.dim(); ++j) {
    const std::uint32_t k0 = next.nearest_axis_index(j, target[j]);
    const std::uint32_t lo = k0 > 3 ? k0 - 3 : 1;
    const std::uint32_t hi = std::min<std::uint32_t>(k0 + 3, next.axis_counts()[j]);
    std::uint32_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint32_t k = lo; k <= hi; ++k) {
      const double y = next.coordinate(j, k);
      if (metric.component(j, y, target[j]) > next.radius()) continue;
      if (metric.component(j, y, previous[j]) > prev_radius) continue;
      const double d = std::abs(y - target[j]);
      if (d < best_d) {
        best = k;
        best_d = d;
      }
    }
    out[j] = next.coordinate(j, best == 0 ? k0 : best);
  }
}

}  // namespace

Chain build_chain(std::span<const double> s, std::span<const double> t, int n, const NetFamily& family) {
  const std::size_t dim = family.dim();
  detail::require(s.size() == dim && t.size() == dim, "build_chain: dimension mismatch");
  detail::require(in_unit_cube(s) && in_unit_cube(t), "build_chain: points must lie in [0,1]^N");
  const Net& start = family.level(n);
  const double d = family.metric()(s, t);
  detail::require(d <= start.radius(), "build_chain: d(s,t) = " + csv::to_string(d) + " exceeds 2^{-n} = " +
                                           csv::to_string(start.radius()));
  std::vector<double> mid(dim);
  for (std::size_t j = 0; j < dim; ++j) mid[j] = 0.5 * (s[j] + t[j]);

  Chain chain;
  chain.start_level = n;
  chain.steps_s = PointSet(dim);
  chain.steps_t = PointSet(dim);
  std::vector<double> tau(dim);
  start.point_into(start.nearest(mid), tau);
  chain.steps_s.push_back(tau);
  chain.steps_t.push_back(tau);

  std::vector<double> next_s(dim), next_t(dim);
  for (int p = n; p < family.max_level(); ++p) {
    const Net& next = family.level(p + 1);
    const double prev_radius = family.level(p).radius();
    const std::size_t last = chain.steps_s.size() - 1;
    guided_step(next, chain.steps_s[last], s, prev_radius, next_s);
    guided_step(next, chain.steps_t[last], t, prev_radius, next_t);
    chain.steps_s.push_back(next_s);
    chain.steps_t.push_back(next_t);
  }
  return chain;
}

namespace {

bool is_member(const Net& net, std::span<const double> x) {
  std::vector<double> q(net.dim());
  net.point_into(net.nearest(x), q);
  return std::equal(q.begin(), q.end(), x.begin());
}

}  // namespace

ChainCheck check_chain(const Chain& chain, std::span<const double> s, std::span<const double> t,
                       const NetFamily& family) {
  ChainCheck check;
  if (chain.length() == 0 || chain.steps_t.size() != chain.length()) return check;
  const auto& metric = family.metric();
  auto s0 = chain.steps_s[0];
  auto t0 = chain.steps_t[0];
  check.shared_start = std::equal(s0.begin(), s0.end(), t0.begin());
  check.within_radius = true;
  check.consecutive_neighbors = true;
  for (std::size_t i = 0; i < chain.length(); ++i) {
    const Net& net = family.level(chain.start_level + static_cast<int>(i));
    const double r = net.radius();
    if (!is_member(net, chain.steps_s[i]) || !is_member(net, chain.steps_t[i])) check.within_radius = false;
    if (metric(chain.steps_s[i], s) > r || metric(chain.steps_t[i], t) > r) check.within_radius = false;
    if (i + 1 < chain.length()) {
      if (metric(chain.steps_s[i], chain.steps_s[i + 1]) > r || metric(chain.steps_t[i], chain.steps_t[i + 1]) > r)
        check.consecutive_neighbors = false;
    }
  }
  return check;
}

std::size_t max_neighbor_count(const NetFamily& family, int n) {
  detail::require(n >= 2, "max_neighbor_count: level must be >= 2");
  return build_neighbor_table(family.level(n - 1), family.level(n)).max_degree();
}

void write_net_csv(std::ostream& os, const Net& net) {
  std::string line;
  for (std::size_t j = 0; j < net.dim(); ++j) {
    if (j) line += ',';
    line += 'x';
    line += std::to_string(j + 1);
  }
  line += '\n';
  os << line;
  std::vector<double> p(net.dim());
  for (std::size_t i = 0; i < net.size(); ++i) {
    line.clear();
    net.point_into(i, p);
    for (std::size_t j = 0; j < net.dim(); ++j) {
      if (j) line += ',';
      csv::append(line, p[j]);
    }
    line += '\n';
    os << line;
  }
}

}  // namespace stablab
