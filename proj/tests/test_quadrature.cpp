#include <cmath>

#include "doctest.h"

#include "cbbre/quadrature.hpp"
#include "cbbre/stats.hpp"

using namespace cbbre;
using doctest::Approx;

TEST_CASE("gamma rule reproduces moments") {
  for (double shape : {0.5, 1.0, 2.0, 3.7}) {
    const GammaRule& r = gamma_rule(shape, 40);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      m0 += r.w[i];
      m1 += r.w[i] * r.x[i];
      m2 += r.w[i] * r.x[i] * r.x[i];
    }
    CHECK(m0 == Approx(1.0).epsilon(1e-12));
    CHECK(m1 == Approx(shape).epsilon(1e-12));
    CHECK(m2 == Approx(shape * (shape + 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("gamma expectation of a Laplace transform") {
  // E[e^{-s Gamma_a}] = (1+s)^{-a}
  for (double a : {1.0, 2.0, 0.3}) {
    for (double s : {0.1, 1.0, 5.0}) {
      const GammaExpectation g = gamma_expectation(a, [&](double x) { return std::exp(-s * x); });
      CHECK(g.value == Approx(std::pow(1.0 + s, -a)).epsilon(1e-10));
    }
  }
}

TEST_CASE("gamma expectation with a non-smooth power") {
  // E[Gamma_2^{1/2}] = Gamma(2.5)/Gamma(2)
  const GammaExpectation g = gamma_expectation(2.0, [](double x) { return std::sqrt(x); });
  CHECK(g.value == Approx(std::tgamma(2.5)).epsilon(1e-9));
}

TEST_CASE("adaptive integrators") {
  CHECK(integrate_gk([](double x) { return std::sin(x); }, 0.0, M_PI) == Approx(2.0).epsilon(1e-13));
  CHECK(integrate_half_line([](double x) { return std::exp(-x) / std::sqrt(x); }) ==
        Approx(std::sqrt(M_PI)).epsilon(1e-11));
  CHECK(integrate_finite_de([](double x) { return std::log(x); }, 0.0, 1.0) == Approx(-1.0).epsilon(1e-11));
}

TEST_CASE("composite weights") {
  const auto s = simpson_weights(11, 0.1);
  double sum = 0.0, cube = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sum += s[i];
    cube += s[i] * std::pow(0.1 * static_cast<double>(i), 3);
  }
  CHECK(sum == Approx(1.0));
  CHECK(cube == Approx(0.25).epsilon(1e-13));
  const auto t = trapezoid_weights(5, 0.5);
  CHECK(t.front() == Approx(0.25));
  CHECK(t[2] == Approx(0.5));
}

TEST_CASE("statistics helpers") {
  const MeanSE m = mean_se({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == Approx(2.5));
  CHECK(m.se == Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(effective_sample_size({1.0, 1.0, 1.0, 1.0}) == Approx(4.0));
  CHECK(effective_sample_size({1.0, 0.0, 0.0, 0.0}) == Approx(1.0));
  CHECK(ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == Approx(0.0));
  CHECK(ks_two_sample({1.0, 2.0}, {3.0, 4.0}) == Approx(1.0));
  CHECK(ks_weighted({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}) == Approx(0.0));
  CHECK(ls_slope({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}) == Approx(2.0));
  const MeanSE w = weighted_mean_se({1.0, 3.0}, {1.0, 3.0});
  CHECK(w.mean == Approx(2.5));
}
