#include "doctest.h"

#include <cmath>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/moment_index.hpp"

using namespace stablab;

namespace {

const SequenceSpec kPareto{SequenceKind::iid_pareto, 1.5, 0.5};
const SequenceSpec kConstant{SequenceKind::constant, 1.5, 0.5};
const SequenceSpec kGauss{SequenceKind::iid_gaussian, 1.5, 0.5};
const SequenceSpec kCorrelated{SequenceKind::gaussian_correlated, 1.5, 0.5};

MomentOptions options(std::uint64_t seed, std::size_t replicates = 200) {
  MomentOptions o;
  o.seed = seed;
  o.replicates = replicates;
  return o;
}

}  // namespace

TEST_SUITE("moment index") {
  TEST_CASE("geometric grid") {
    CHECK(geometric_grid(2, 5) == std::vector<std::uint64_t>{4, 8, 16, 32});
    CHECK_THROWS_AS(geometric_grid(5, 2), InvalidArgument);
  }

  TEST_CASE("running maxima are monotone on every replicate") {
    for (const auto& src : {kPareto, kConstant, kGauss, kCorrelated}) {
      const auto c = moment_curve(src, 0.75, geometric_grid(0, 12), options(1, 50));
      for (const auto& row : c.per_replicate)
        for (std::size_t i = 1; i < row.size(); ++i) CHECK(row[i] >= row[i - 1]);
    }
  }

  TEST_CASE("constant source has a flat curve") {
    const auto c = moment_curve(kConstant, 0.75, geometric_grid(4, 16), options(2));
    for (double m : c.m_values) CHECK(m == c.m_values.front());
    const auto th = theta_estimate(c, 200, 2);
    CHECK(th.theta_hat <= 0.02);
    CHECK(th.theta_hat >= -0.05);
  }

  TEST_CASE("pareto theta is gamma/alpha") {
    const auto c = moment_curve(kPareto, 0.75, geometric_grid(4, 16), options(3));
    const auto th = theta_estimate(c, 500, 3);
    CHECK(th.theta_hat >= 0.4);
    CHECK(th.theta_hat <= 0.6);
    CHECK(th.ci_lo <= th.theta_hat);
    CHECK(th.theta_hat <= th.ci_hi);
    CHECK(th.window_hi == 65536);
  }

  TEST_CASE("block sampling agrees with direct sampling") {
    auto block = options(4);
    block.method = MaxMethod::block;
    const auto d = theta_estimate(moment_curve(kPareto, 0.75, geometric_grid(4, 14), options(4)), 200, 4);
    const auto b = theta_estimate(moment_curve(kPareto, 0.75, geometric_grid(4, 14), block), 200, 4);
    CHECK(std::abs(d.theta_hat - b.theta_hat) <= 0.08);
    CHECK_THROWS_AS(moment_curve(kCorrelated, 0.5, geometric_grid(4, 8), block), InvalidArgument);
  }

  TEST_CASE("jensen relation between moment orders") {
    for (const auto& src : {kPareto, kGauss}) {
      const auto lo = theta_estimate(moment_curve(src, 0.5, geometric_grid(4, 14), options(5)), 200, 5);
      const auto hi = theta_estimate(moment_curve(src, 1.0, geometric_grid(4, 14), options(5)), 200, 5);
      CHECK(lo.theta_hat <= 0.5 * hi.theta_hat + 0.05);
      CHECK(lo.theta_hat >= -0.05);
      CHECK(hi.theta_hat <= 1.05);
    }
  }

  TEST_CASE("worker count does not change results") {
    auto one = options(6, 40), many = options(6, 40);
    many.workers = 4;
    const auto a = moment_curve(kGauss, 1.0, geometric_grid(2, 10), one);
    const auto b = moment_curve(kGauss, 1.0, geometric_grid(2, 10), many);
    CHECK(a.m_values == b.m_values);
  }

  TEST_CASE("gaussian maxima grow like sqrt(log n)") {
    const auto iid = gaussian_max_check(kGauss, geometric_grid(8, 16), options(7), 1.0, 2.0);
    CHECK(iid.upper_ok);
    CHECK(iid.lower_ok);
    const auto corr = gaussian_max_check(kCorrelated, geometric_grid(8, 16), options(7));
    CHECK(corr.min_ratio >= 0.3);
    const auto con = gaussian_max_check(SequenceSpec{SequenceKind::constant, 1.5, 0.5}, geometric_grid(8, 16),
                                        options(7));
    // A constant numerator gives ratios falling like 1/sqrt(log n).
    CHECK(con.ratio.back() == doctest::Approx(con.ratio.front() * std::sqrt(8.0 / 16.0)).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_max_check(kPareto, geometric_grid(8, 9), options(7)), InvalidArgument);
  }

  TEST_CASE("heavy-tail sandwich") {
    const auto s = heavy_tail_bound_check(kPareto, 0.75, 1.5, 0.1, geometric_grid(4, 16), options(8));
    CHECK(s.ok);
    CHECK(s.lower_applicable);
    CHECK(s.slope >= 0.5 - 0.05);
    CHECK(s.slope <= 0.5 + 0.1);
    for (std::size_t i = 0; i < s.n.size(); ++i) {
      CHECK(s.k9 * s.lower_envelope[i] <= s.m_hat[i] * (1 + 1e-12));
      CHECK(s.m_hat[i] <= s.k7 * s.upper_envelope[i] * (1 + 1e-12));
    }
    const auto c = heavy_tail_bound_check(kConstant, 0.75, 1.5, 0.1, geometric_grid(4, 10), options(8));
    CHECK_FALSE(c.lower_applicable);
    CHECK_THROWS_AS(heavy_tail_bound_check(kPareto, 1.5, 1.5, 0.1, geometric_grid(4, 8), options(8)),
                    InvalidArgument);
  }

  TEST_CASE("orlicz norm") {
    const std::vector<double> x{1.0, -2.0, 3.0, 0.5};
    CHECK(orlicz_norm(x, 1.0) == doctest::Approx(6.5 / 4).epsilon(1e-10));
    const std::vector<double> c(10, 2.5);
    CHECK(orlicz_norm(c, 2.0) == doctest::Approx(2.5).epsilon(1e-10));
    CHECK_THROWS_AS(orlicz_norm(x, 0.5), InvalidArgument);
    const auto rep = orlicz_max_check(kPareto, 1.2, geometric_grid(4, 14), options(9));
    CHECK(rep.ok);
  }

  TEST_CASE("argument checks") {
    CHECK_THROWS_AS(moment_curve(kPareto, 0.0, geometric_grid(1, 4)), InvalidArgument);
    CHECK_THROWS_AS(moment_curve(kPareto, 0.75, {4, 4}), InvalidArgument);
    CHECK_THROWS_AS(moment_curve(kPareto, 0.75, geometric_grid(1, 4), options(1, 1)), InvalidArgument);
    const auto c = moment_curve(kPareto, 0.75, geometric_grid(1, 3), options(1, 10));
    CHECK_THROWS_AS(theta_estimate(c), InvalidArgument);
  }
}
