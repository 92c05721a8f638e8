#include <cmath>

#include "doctest.h"

#include "cbbre/environment.hpp"
#include "cbbre/error.hpp"
#include "cbbre/rng.hpp"
#include "cbbre/stats.hpp"

using namespace cbbre;
using doctest::Approx;

TEST_CASE("degenerate and deterministic paths") {
  const EnvPath p = sample_env_path(0.0, 0.3, 2.0, 20, 7, 0, PathFlavor::K0);
  for (std::size_t i = 0; i < p.t.size(); ++i) CHECK(p.values[i] == Approx(0.3 * p.t[i]));
  const EnvPath a = sample_env_path(1.0, -0.5, 1.0, 100, 42, 3, PathFlavor::K);
  const EnvPath b = sample_env_path(1.0, -0.5, 1.0, 100, 42, 3, PathFlavor::K);
  CHECK(a.values == b.values);
  const EnvPath c = sample_env_path(1.0, -0.5, 1.0, 100, 42, 4, PathFlavor::K);
  CHECK(a.values != c.values);
  CHECK(a.values.front() == 0.0);
}

TEST_CASE("exponential functional of trivial integrands") {
  const EnvPath zero = make_env_path({0.0, 0.5, 1.5}, {0.0, 0.0, 0.0}, PathFlavor::K, 0.0, 0.0);
  for (ExpRule r : {ExpRule::Trapezoid, ExpRule::ExactLinear, ExpRule::BridgeCorrected}) {
    CHECK(exp_functional(zero, 2.7, r).value == Approx(1.5));
  }
  const EnvPath p = sample_env_path(1.0, -0.5, 3.0, 300, 1, 0, PathFlavor::K);
  CHECK(exp_functional(p, 0.0, ExpRule::ExactLinear).value == Approx(3.0));
}

TEST_CASE("exact linear rule on a linear path") {
  // K_s = s on [0, 1]: int e^{theta s} ds = (e^theta - 1)/theta
  const EnvPath lin = make_env_path({0.0, 1.0}, {0.0, 1.0}, PathFlavor::Drifted, 0.0, 1.0);
  CHECK(exp_functional(lin, 2.0, ExpRule::ExactLinear).value == Approx(std::expm1(2.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("log-space functional does not overflow") {
  const EnvPath big = make_env_path({0.0, 1.0}, {0.0, 2000.0}, PathFlavor::Drifted, 0.0, 2000.0);
  const ExpFunctional f = exp_functional(big, 1.0, ExpRule::ExactLinear);
  CHECK(f.saturated);
  CHECK(f.log_value == Approx(2000.0 - std::log(2000.0)).epsilon(1e-12));
}

TEST_CASE("Dufresne shape") {
  CHECK(dufresne_law(-1.0) == 1.0);
  CHECK(dufresne_law(-2.0) == 2.0);
  CHECK_THROWS_AS(dufresne_law(0.0), Error);
}

TEST_CASE("perpetual functional mean, small sample") {
  // 1/(2 I_inf^{(-1)}) is Exp(1); T = 30 truncation is negligible at this sample size.
  std::vector<double> v(4000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rng rng(11, i, Stream::Auxiliary);
    v[i] = 1.0 / (2.0 * sample_exp_functional(-1.0, 30.0, 1500, rng));
  }
  const MeanSE m = mean_se(v);
  CHECK(std::fabs(m.mean - 1.0) <= 3.0 * m.se);
}

TEST_CASE("moment identity at p = 0") {
  const Lemma1Report r = lemma1_moments(0.7, 0.0, 1.0, 50, 3, 50);
  CHECK(r.lhs.value == 1.0);
  CHECK(r.rhs.value == 1.0);
  CHECK(r.identity_ok);
}

TEST_CASE("density normalization and small-time refusal") {
  const MYDensity d(1.0, 0.0);
  CHECK(d.normalization() == Approx(1.0).epsilon(1e-3));
  CHECK(d.cdf(1e6) == Approx(1.0).epsilon(1e-3));
  CHECK(d.pdf(1.0) > 0.0);
  CHECK(d.expect([](double) { return 1.0; }) == Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(MYDensity(0.1, 0.0), Error);
}

TEST_CASE("density mean against Monte Carlo") {
  const MYDensity d(2.0, 1.0);
  std::vector<double> v(4000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rng rng(5, i, Stream::Auxiliary);
    v[i] = std::exp(-1.0 / (2.0 * sample_exp_functional(1.0, 2.0, 400, rng)));
  }
  const MeanSE m = mean_se(v);
  const double q = d.expect([](double x) { return std::exp(-x); });
  CHECK(std::fabs(m.mean - q) <= 3.0 * m.se + 1e-3);
}

TEST_CASE("Hartman-Watson kernel refuses small times") {
  CHECK_THROWS_AS(hw_kernel(1.0, 0.1), Error);
  CHECK(std::isfinite(hw_kernel(1.0, 1.0)));
}
