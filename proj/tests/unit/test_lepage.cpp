#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/lepage.hpp"
#include "stablab/rng.hpp"

using namespace stablab;

namespace {

PointSet unit_grid(int intervals) {
  PointSet grid(1);
  for (int i = 0; i <= intervals; ++i) grid.push_back(std::vector<double>{static_cast<double>(i) / intervals});
  return grid;
}

PointSet net_points(const Net& net) { return net.points(); }

}  // namespace

TEST_SUITE("series constant") {
  TEST_CASE("alpha = 1 closed form") {
    const CAlphaParts p = c_alpha_parts(1.0);
    CHECK(p.a == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(p.b == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
    CHECK(std::abs(c_alpha(1.0) - 2.0 / (std::numbers::pi * std::numbers::pi)) <= 1e-12);
  }

  TEST_CASE("closed forms agree with quadrature") {
    for (double alpha : {0.1, 0.5, 1.0, 1.5, 1.99}) {
      CAPTURE(alpha);
      const CAlphaParts p = c_alpha_parts(alpha);
      CHECK(std::abs(p.b - p.b_quadrature) <= 1e-8);
      CHECK(std::abs(p.a - p.a_quadrature) <= 1e-10);
      CHECK(std::abs(p.c - p.c_quadrature) <= 1e-8);
      CHECK(std::isfinite(p.c));
      CHECK(p.c > 0.0);
      CHECK(series_constant(alpha) == doctest::Approx(std::pow(p.b, -1.0 / alpha)));
    }
  }

  TEST_CASE("endpoints are rejected") {
    CHECK_THROWS_AS(c_alpha(0.0), InvalidArgument);
    CHECK_THROWS_AS(c_alpha(2.0), InvalidArgument);
    CHECK_NOTHROW(c_alpha(1e-3));
  }
}

TEST_SUITE("kernel") {
  TEST_CASE("kernel vanishes at t = 0") {
    const std::vector<FieldModel> models{FieldModel::hfsm(1.5, 0.5, 1), FieldModel::riesz_bessel(1.5, 0.3, 0.5, 1),
                                         FieldModel::hfss(1.5, {0.4, 0.7})};
    for (const auto& m : models) {
      const std::vector<double> t(m.dim(), 0.0), x(m.dim(), 0.37);
      CHECK(m.kernel(t, x) == std::complex<double>(0.0, 0.0));
    }
  }

  TEST_CASE("hfsm kernel at x = pi") {
    const FieldModel m = FieldModel::hfsm(1.5, 0.5, 1);
    const double f = m.spectral().radial(std::numbers::pi);
    const auto h = m.kernel(std::vector<double>{1.0}, std::vector<double>{std::numbers::pi});
    CHECK(h.real() == doctest::Approx(-2.0 * std::pow(f, 1.0 / 1.5)).epsilon(1e-14));
    CHECK(std::abs(h.imag()) <= 1e-15);
  }

  TEST_CASE("one-dimensional sheet kernel is hfsm up to the constant") {
    const double alpha = 1.3, hurst = 0.6;
    const FieldModel sheet = FieldModel::hfss(alpha, {hurst});
    const FieldModel fsm = FieldModel::hfsm(alpha, hurst, 1, 1.0);
    RngStream rng(30, 0);
    for (int i = 0; i < 1000; ++i) {
      const std::vector<double> t{4 * rng.uniform() - 2}, x{20 * rng.uniform() - 10};
      const auto a = sheet.kernel(t, x), b = fsm.kernel(t, x);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
  }

  TEST_CASE("singular points and bad models") {
    const FieldModel m = FieldModel::hfss(1.5, {0.4, 0.7});
    CHECK_THROWS_AS(m.kernel(std::vector<double>{1, 1}, std::vector<double>{0, 1}), InvalidArgument);
    CHECK_THROWS_AS(FieldModel::hfsm(1.5, 0.5, 1, {}, PhiChoice{5.0, 0.1}), InvalidArgument);
    CHECK_THROWS_AS(FieldModel::hfsm(1.5, 0.5, 1).with_normalization(-1.0), InvalidArgument);
    CHECK_THROWS_AS(m.spectral(), InvalidArgument);
  }

  TEST_CASE("model hash tracks parameters") {
    CHECK(FieldModel::hfsm(1.5, 0.5, 1).hash() == FieldModel::hfsm(1.5, 0.5, 1).hash());
    CHECK(FieldModel::hfsm(1.5, 0.5, 1).hash() != FieldModel::hfsm(1.5, 0.6, 1).hash());
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  }
}

TEST_SUITE("simulation") {
  TEST_CASE("paths are anchored at the origin") {
    SeriesBudget budget;
    budget.terms = 2000;
    for (std::uint64_t r = 0; r < 5; ++r) {
      budget.stream_id = r;
      const auto p = simulate_path(FieldModel::hfsm(1.5, 0.5, 1), unit_grid(16), budget);
      CHECK(p.values.front() == 0.0);
      PointSet origin(2);
      origin.push_back(std::vector<double>{0.0, 0.0});
      origin.push_back(std::vector<double>{0.5, 0.5});
      CHECK(simulate_path(FieldModel::hfss(1.5, {0.4, 0.7}), origin, budget).values[0] == 0.0);
      CHECK(simulate_path(FieldModel::riesz_bessel(1.5, 0.3, 0.9, 2), origin, budget).values[0] == 0.0);
    }
  }

  TEST_CASE("simulation is deterministic") {
    SeriesBudget budget;
    budget.terms = 5000;
    budget.seed = 3;
    const FieldModel m = FieldModel::hfsm(1.2, 0.7, 2);
    const Net net = build_net(NetKind::dyadic, 2, 4);
    const auto a = simulate_net(m, net, budget), b = simulate_net(m, net, budget);
    CHECK(a.values == b.values);
    budget.stream_id = 1;
    CHECK(simulate_net(m, net, budget).values != a.values);
  }

  TEST_CASE("lattice recurrences match generic evaluation") {
    SeriesBudget budget;
    budget.terms = 3000;
    budget.seed = 4;
    const std::vector<std::pair<FieldModel, Net>> cases{
        {FieldModel::hfsm(1.5, 0.5, 1), build_net(NetKind::dyadic, 1, 7)},
        {FieldModel::hfsm(1.2, 0.7, 2), build_net(NetKind::dyadic, 2, 4)},
        {FieldModel::riesz_bessel(1.5, 0.3, 0.5, 1), build_net(NetKind::dyadic, 1, 6)},
        {FieldModel::hfss(1.5, {0.4, 0.7}), build_net(NetKind::dyadic, 2, 4)},
        {FieldModel::hfss(1.5, {0.4, 0.7}), build_net(NetKind::anisotropic, 2, 2, {0.4, 0.7})}};
    for (const auto& [model, net] : cases) {
      const auto lattice = simulate_net(model, net, budget);
      const auto generic = simulate_path(model, net_points(net), budget);
      REQUIRE(lattice.values.size() == generic.values.size());
      double scale = 0.0, diff = 0.0;
      for (std::size_t i = 0; i < generic.values.size(); ++i) {
        scale = std::max(scale, std::abs(generic.values[i]));
        diff = std::max(diff, std::abs(lattice.values[i] - generic.values[i]));
      }
      // Phases of large frequencies differ by argument rounding between the two evaluation orders.
      CHECK(diff <= 1e-5 * scale);
    }
  }

  TEST_CASE("family levels restrict the finest dyadic level") {
    SeriesBudget budget;
    budget.terms = 2000;
    const FieldModel m = FieldModel::hfsm(1.5, 0.5, 1);
    const NetFamily family(NetKind::dyadic, 1, 6);
    const auto levels = simulate_family(m, family, 2, budget);
    REQUIRE(levels.size() == 5);
    const auto direct = simulate_net(m, family.level(3), budget);
    for (std::size_t i = 0; i < direct.values.size(); ++i)
      CHECK(levels[1][i] == doctest::Approx(direct.values[i]).epsilon(1e-9));
  }

  TEST_CASE("zero normalization gives the zero field") {
    SeriesBudget budget;
    budget.terms = 1000;
    const auto p = simulate_path(FieldModel::hfsm(1.5, 0.5, 1).with_normalization(0.0), unit_grid(8), budget);
    for (double v : p.values) CHECK(v == 0.0);
  }

  TEST_CASE("budget validation") {
    SeriesBudget budget;
    budget.terms = 0;
    CHECK_THROWS_AS(validate(budget), InvalidArgument);
    budget.terms = 10;
    CHECK_THROWS_AS(simulate_path(FieldModel::hfsm(1.5, 0.5, 2), unit_grid(4), budget), InvalidArgument);
    CHECK_THROWS_AS(simulate_path(FieldModel::hfsm(1.5, 0.5, 1), PointSet(1), budget), InvalidArgument);
  }
}

TEST_SUITE("truncation") {
  TEST_CASE("the origin alone never changes") {
    PointSet origin(1);
    origin.push_back(std::vector<double>{0.0});
    const auto t = truncation_diagnostic(FieldModel::hfsm(1.5, 0.5, 1), origin, {10, 100, 1000}, 3, {});
    for (const auto& row : t.deltas)
      for (double d : row) CHECK(d == 0.0);
  }

  TEST_CASE("doubling J barely moves the sup norm for light tails") {
    SeriesBudget budget;
    budget.seed = 10;
    const auto light = truncation_diagnostic(FieldModel::hfsm(0.8, 0.5, 1), unit_grid(256), {10000, 20000}, 20, budget);
    CHECK(light.median_sup_change[0] < 0.01);
    // Tail terms decay like J^{1/2 - 1/alpha}; at alpha = 1.5 that is J^{-1/6}.
    const auto heavy = truncation_diagnostic(FieldModel::hfsm(1.5, 0.5, 1), unit_grid(256), {10000, 20000}, 20, budget);
    CHECK(heavy.median_sup_change[0] < 0.1);
    MESSAGE("median sup change 1e4 -> 2e4: alpha 0.8 " << light.median_sup_change[0] << ", alpha 1.5 "
                                                        << heavy.median_sup_change[0]);
  }

  TEST_CASE("deltas shrink as J grows") {
    SeriesBudget budget;
    budget.seed = 11;
    const auto t = truncation_diagnostic(FieldModel::hfsm(1.5, 0.5, 1), unit_grid(256), {100, 1000, 10000, 100000},
                                         20, budget);
    CHECK(t.nonincreasing);
  }

  TEST_CASE("smaller alpha converges faster") {
    SeriesBudget budget;
    budget.seed = 12;
    const auto fast = truncation_diagnostic(FieldModel::hfsm(0.8, 0.5, 1), unit_grid(256), {1000, 10000}, 20, budget);
    const auto slow = truncation_diagnostic(FieldModel::hfsm(1.8, 0.5, 1), unit_grid(256), {1000, 10000}, 20, budget);
    CHECK(fast.relative_delta[0] < slow.relative_delta[0]);
  }

  TEST_CASE("J list must increase") {
    CHECK_THROWS_AS(truncation_diagnostic(FieldModel::hfsm(1.5, 0.5, 1), unit_grid(4), {100, 100}, 1, {}),
                    InvalidArgument);
  }
}

TEST_SUITE("export") {
  TEST_CASE("binary round trip") {
    SeriesBudget budget;
    budget.terms = 500;
    budget.seed = 77;
    budget.stream_id = 5;
    const auto p = simulate_net(FieldModel::hfss(1.5, {0.4, 0.7}), build_net(NetKind::dyadic, 2, 3), budget);
    std::stringstream ss;
    write_path_binary(ss, p);
    const PathSample q = read_path_binary(ss);
    CHECK(q.values == p.values);
    CHECK(q.grid == p.grid);
    CHECK(q.model_hash == p.model_hash);
    CHECK(q.budget.terms == 500);
    CHECK(q.budget.seed == 77);
    CHECK(q.budget.stream_id == 5);

    std::stringstream bad("STBLPATX");
    CHECK_THROWS_AS(read_path_binary(bad), RuntimeError);
  }

  TEST_CASE("csv layout") {
    PathSample p;
    p.grid = PointSet(1, {0.0, 0.5});
    p.values = {0.0, -1.25};
    std::ostringstream os;
    write_path_csv(os, p);
    CHECK(os.str() == "t1,value\n0,0\n0.5,-1.25\n");
  }
}
