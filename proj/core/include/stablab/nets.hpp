#pragma once

// Chaining nets on [0,1]^N: dyadic grids under the l-infinity metric and
// anisotropic grids under rho(s,t) = max_j |s_j - t_j|^{H_j}, together with
// their neighbor systems and approximating chains.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stablab/point_set.hpp"

namespace stablab {

class AnisoMetric {
 public:
  /// Every exponent must lie in (0, 1].
  explicit AnisoMetric(std::vector<double> exponents);
  static AnisoMetric linf(std::size_t dim);

  std::size_t dim() const noexcept { return exponents_.size(); }
  std::span<const double> exponents() const noexcept { return exponents_; }
  /// Q = sum_j 1/H_j.
  double q() const noexcept;
  bool is_linf() const noexcept;

  /// |a - b|^{H_j}. This is the single place the per-axis distance is computed,
  /// so neighbor enumeration and brute-force scans agree bit for bit.
  double component(std::size_t axis, double a, double b) const noexcept;
  double operator()(std::span<const double> s, std::span<const double> t) const;

  friend bool operator==(const AnisoMetric&, const AnisoMetric&) = default;

 private:
  std::vector<double> exponents_;
};

double rho(std::span<const double> s, std::span<const double> t, const AnisoMetric& metric);

enum class NetKind { dyadic, anisotropic };

const char* to_string(NetKind kind);

/// Finite lattice D_n (or D~_n) in [0,1]^N. Points are
/// (k_1 f_1, ..., k_N f_N) with 1 <= k_j <= count_j, stored implicitly and
/// enumerated in lexicographic order of the index vector.
class Net {
 public:
  NetKind kind() const noexcept { return kind_; }
  int level() const noexcept { return level_; }
  std::size_t dim() const noexcept { return counts_.size(); }
  const AnisoMetric& metric() const noexcept { return metric_; }
  std::size_t size() const noexcept { return size_; }

  std::span<const std::uint32_t> axis_counts() const noexcept { return counts_; }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  /// Coordinate of 1-based index k on the given axis.
  double coordinate(std::size_t axis, std::uint32_t k) const;
  /// Covering radius 2^{-n} in the net's metric.
  double radius() const noexcept;

  std::vector<std::uint32_t> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::uint32_t> k) const;
  void point_into(std::size_t flat, std::span<double> out) const;
  std::vector<double> point(std::size_t flat) const;
  PointSet points() const;

  /// Nearest lattice index along one axis; ties go to the lower index.
  std::uint32_t nearest_axis_index(std::size_t axis, double x) const;
  /// Per-axis nearest point, which is a metric-nearest point for rho and l-inf.
  std::size_t nearest(std::span<const double> x) const;

  friend Net build_net(NetKind kind, std::size_t dim, int level, std::vector<double> exponents);

 private:
  Net(NetKind kind, int level, AnisoMetric metric) : kind_(kind), level_(level), metric_(std::move(metric)) {}

  NetKind kind_;
  int level_;
  AnisoMetric metric_;
  std::vector<std::uint32_t> counts_;
  std::vector<double> spacing_;
  std::size_t size_ = 0;
};

/// Largest level a dyadic net of the given dimension may be built at.
int max_dyadic_level(std::size_t dim);
/// Largest number of points any single net may hold.
inline constexpr std::size_t kMaxNetPoints = std::size_t{1} << 24;

/// Builds D_n (dyadic; exponents ignored, may be empty) or D~_n (anisotropic).
Net build_net(NetKind kind, std::size_t dim, int level, std::vector<double> exponents = {});

enum class NeighborMode {
  /// Coarse points at distance <= 2^{-(n-1)} that do not coincide with the
  /// fine point. Bounded by 3^N - 1 on dyadic nets.
  proper,
  /// Same set plus the coincident coarse point when the fine point is also a
  /// coarse point. This is the relation the chains step along.
  inclusive,
};

/// O_{n-1}(tau): points of `coarse` (level n-1) within 2^{-(n-1)} of the
/// point `fine_index` of `fine` (level n). Indices are returned ascending.
std::vector<std::size_t> neighbors(const Net& coarse, const Net& fine, std::size_t fine_index,
                                   NeighborMode mode = NeighborMode::proper);

/// Proper neighbor lists for every point of a fine net, in CSR layout.
struct NeighborTable {
  std::vector<std::size_t> offsets;  // size fine.size() + 1
  std::vector<std::uint32_t> indices;

  std::size_t max_degree() const;
  std::span<const std::uint32_t> of(std::size_t fine_index) const {
    return {indices.data() + offsets[fine_index], offsets[fine_index + 1] - offsets[fine_index]};
  }
};

NeighborTable build_neighbor_table(const Net& coarse, const Net& fine);

/// Nets of one kind at levels 1..max_level.
class NetFamily {
 public:
  NetFamily(NetKind kind, std::size_t dim, int max_level, std::vector<double> exponents = {});

  NetKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  int max_level() const noexcept { return static_cast<int>(nets_.size()); }
  const Net& level(int n) const;
  const AnisoMetric& metric() const { return nets_.front().metric(); }
  /// True when every level is a subset of the next (dyadic, or anisotropic
  /// with every 1/H_j an integer).
  bool nested() const noexcept { return nested_; }

 private:
  NetKind kind_;
  std::size_t dim_;
  bool nested_ = false;
  std::vector<Net> nets_;
};

struct Chain {
  int start_level = 0;
  PointSet steps_s;  // tau_p(s), p = start_level ... start_level + size - 1
  PointSet steps_t;

  std::size_t length() const noexcept { return steps_s.size(); }
};

/// Chains tau_p(s), tau_p(t) for p = n ... family.max_level(). The shared start
/// is the per-axis nearest level-n point to (s+t)/2. Each continuation picks,
/// among level-(p+1) points within 2^{-(p+1)} of the target and within 2^{-p}
/// of the previous step, the one nearest the target.
Chain build_chain(std::span<const double> s, std::span<const double> t, int n, const NetFamily& family);

struct ChainCheck {
  bool shared_start = false;
  bool within_radius = false;
  bool consecutive_neighbors = false;
  bool ok() const noexcept { return shared_start && within_radius && consecutive_neighbors; }
};

ChainCheck check_chain(const Chain& chain, std::span<const double> s, std::span<const double> t,
                       const NetFamily& family);

/// Maximum proper-neighbor count over the points of level n (n >= 2).
std::size_t max_neighbor_count(const NetFamily& family, int n);

/// Points of a net as CSV: header x1,...,xN then one row per point.
void write_net_csv(std::ostream& os, const Net& net);

}  // namespace stablab
