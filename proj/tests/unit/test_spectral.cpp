#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/spectral.hpp"

using namespace stablab;

TEST_SUITE("spectral") {
  TEST_CASE("hfsm density") {
    const SpectralDensity sd = SpectralDensity::hfsm(1.5, 0.5, 2, 0.7);
    CHECK(sd.radial(1.0) == doctest::Approx(0.7).epsilon(1e-15));
    const double expo = -(1.5 * 0.5 + 2);
    for (double r : {1e-3, 0.2, 1.0, 7.0, 1e5}) CHECK(sd.radial(2 * r) / sd.radial(r) == doctest::Approx(std::pow(2.0, expo)));
    CHECK(sd(std::vector<double>{0.6, 0.8}) == doctest::Approx(0.7));
    CHECK_THROWS_AS(sd.radial(0.0), InvalidArgument);
    CHECK_THROWS_AS(SpectralDensity::hfsm(2.0, 0.5, 1), InvalidArgument);
    CHECK_THROWS_AS(SpectralDensity::hfsm(1.5, 1.0, 1), InvalidArgument);
  }

  TEST_CASE("riesz-bessel density") {
    const SpectralDensity rb = SpectralDensity::riesz_bessel(1.5, 0.0, 0.8, 1, 2.0);
    CHECK(rb.radial(1e-9) == doctest::Approx(2.0));
    CHECK(rb.radial(1.0) == doctest::Approx(2.0 / std::pow(2.0, 0.8)));
    const SpectralDensity rb2 = SpectralDensity::riesz_bessel(1.5, 0.3, 0.5, 1);
    CHECK(rb2.radial(2.0) == doctest::Approx(1.0 / (std::pow(2.0, 0.6) * std::pow(5.0, 0.5))));
    CHECK_THROWS_AS(SpectralDensity::riesz_bessel(1.5, 0.1, 0.2, 1), InvalidArgument);
    CHECK_THROWS_AS(SpectralDensity::riesz_bessel(1.5, 1.5, 0.2, 1), InvalidArgument);
  }

  TEST_CASE("scale parameter at the origin vanishes") {
    const SpectralDensity sd = SpectralDensity::hfsm(1.5, 0.5, 1);
    CHECK(scale_param(sd, std::vector<double>{0.0}) == 0.0);
    CHECK_THROWS_AS(scale_param(sd, std::vector<double>{0.0, 1.0}), InvalidArgument);
  }

  TEST_CASE("normalized hfsm has unit scale at e_1 and is H-homogeneous") {
    struct Case {
      double alpha, hurst;
      std::size_t dim;
    };
    for (const Case& cs : {Case{1.5, 0.5, 1}, Case{1.2, 0.7, 2}, Case{0.8, 0.3, 1}, Case{1.7, 0.6, 3}}) {
      CAPTURE(cs.alpha);
      const double c = normalize_hfsm(cs.alpha, cs.hurst, cs.dim);
      const SpectralDensity sd = SpectralDensity::hfsm(cs.alpha, cs.hurst, cs.dim, c);
      std::vector<double> e1(cs.dim, 0.0);
      e1[0] = 1.0;
      CHECK(scale_param(sd, e1) == doctest::Approx(1.0).epsilon(1e-4));
      for (double lambda : {0.5, 2.0, 4.0}) {
        std::vector<double> t(cs.dim, 0.3);
        const double base = scale_param(sd, t);
        for (auto& v : t) v *= lambda;
        CHECK(scale_param(sd, t) == doctest::Approx(std::pow(lambda, cs.hurst) * base).epsilon(5e-4));
      }
    }
  }

  TEST_CASE("scale integral is linear in c") {
    const std::vector<double> t{0.7};
    const double one = scale_integral(SpectralDensity::hfsm(1.3, 0.4, 1, 1.0), t);
    const double two = scale_integral(SpectralDensity::hfsm(1.3, 0.4, 1, 2.0), t);
    CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
  }

  TEST_CASE("normalization regression pin") {
    CHECK(normalize_hfsm(1.5, 0.5, 1) == doctest::Approx(0.1377141134).epsilon(1e-8));
  }

  TEST_CASE("sheet scale parameter factorizes") {
    const std::vector<double> h{0.4, 0.7};
    const double full = hfss_scale_param(1.5, h, std::vector<double>{0.5, 0.25});
    const double a = hfss_scale_param(1.5, std::vector<double>{0.4}, std::vector<double>{0.5});
    const double b = hfss_scale_param(1.5, std::vector<double>{0.7}, std::vector<double>{0.25});
    CHECK(full == doctest::Approx(a * b).epsilon(1e-10));
    CHECK(a / hfss_scale_param(1.5, std::vector<double>{0.4}, std::vector<double>{1.0}) ==
          doctest::Approx(std::pow(0.5, 0.4)).epsilon(1e-4));
  }

  TEST_CASE("envelope") {
    const SpectralDensity sd = SpectralDensity::hfsm(1.5, 0.5, 1, 0.3);
    const EnvelopeFit same = envelope_check(sd, 0.5);
    CHECK(same.k11 == doctest::Approx(0.3).epsilon(1e-10));
    CHECK_FALSE(same.violated);
    CHECK(envelope_check(sd, 0.6).violated);

    const SpectralDensity rb = SpectralDensity::riesz_bessel(1.5, 0.3, 0.5, 1);
    const EnvelopeFit fit = envelope_check(rb, pitman_exponent(rb));
    CHECK(std::isfinite(fit.k11));
    CHECK_FALSE(fit.violated);
  }

  TEST_CASE("pitman ratios") {
    const double c = pitman_normalization(1.5, 0.3, 0.5, 1);
    const SpectralDensity rb = SpectralDensity::riesz_bessel(1.5, 0.3, 0.5, 1, c);
    CHECK(pitman_exponent(rb) == doctest::Approx(0.4));
    std::vector<std::vector<double>> ts;
    for (int k = 4; k <= 10; ++k) ts.push_back({std::ldexp(1.0, -k)});
    const auto r = pitman_ratio(rb, ts);
    for (double v : r) {
      CHECK(v >= 0.8);
      CHECK(v <= 1.25);
    }
    const std::size_t m = r.size();
    CHECK(std::abs(r[m - 1] - 1) <= std::abs(r[m - 2] - 1));
    CHECK(std::abs(r[m - 2] - 1) <= std::abs(r[m - 3] - 1));

    const SpectralDensity doubled = SpectralDensity::riesz_bessel(1.5, 0.3, 0.6, 1, c);
    CHECK(pitman_exponent(doubled) == doctest::Approx((2 * (0.3 + 0.6) - 1) / 1.5));
    CHECK(std::isfinite(pitman_ratio(doubled, {{0.01}})[0]));

    CHECK_THROWS_AS(pitman_ratio(SpectralDensity::hfsm(1.5, 0.5, 1), ts), InvalidArgument);
  }
}
