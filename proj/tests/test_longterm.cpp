#include <cmath>

#include "doctest.h"

#include "cbbre/error.hpp"
#include "cbbre/longterm.hpp"
#include "cbbre/mechanism.hpp"

using namespace cbbre;
using doctest::Approx;

namespace {

const double kPi = std::acos(-1.0);

ProbOptions mc(std::size_t n, std::uint64_t seed) {
  ProbOptions o;
  o.method = ProbMethod::MonteCarlo;
  o.n_mc = n;
  o.steps = 500;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("survival probability limits and monotonicity") {
  const EnvParams env = derive_env(Feller{0.0, 1.0}, 1.0);
  const ProbOptions q;
  CHECK(survival_prob(1.0, 0.01, env, mc(200, 1)).value == Approx(1.0).epsilon(1e-6));
  CHECK(survival_prob(1e-9, 1.0, env, q).value < 1e-6);
  double prev = 1.0;
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    const double p = survival_prob(1.0, t, env, q).value;
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
  prev = 0.0;
  for (double z : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double p = survival_prob(z, 2.0, env, q).value;
    CHECK(p >= prev - 1e-12);
    prev = p;
  }
}

TEST_CASE("survival: Monte Carlo and density quadrature agree") {
  const EnvParams env = derive_env(Feller{0.0, 1.0}, 1.0);
  const MCEstimate a = survival_prob(1.0, 1.0, env, ProbOptions{});
  const MCEstimate b = survival_prob(1.0, 1.0, env, mc(4000, 2));
  CHECK(std::fabs(a.value - b.value) <= std::max(3.0 * b.se, 1e-2));
}

TEST_CASE("explosion: Monte Carlo and density quadrature agree") {
  const EnvParams env = derive_env(Stable{0.25, -0.5, -1.0}, 1.0);
  const MCEstimate a = explosion_prob(1.0, 4.0, env, ProbOptions{});
  const MCEstimate b = explosion_prob(1.0, 4.0, env, mc(4000, 3));
  CHECK(a.value > 0.0);
  CHECK(std::fabs(a.value - b.value) <= std::max(3.0 * b.se, 1e-2));
  CHECK(explosion_prob(1e-9, 4.0, env, ProbOptions{}).value < 1e-6);
}

TEST_CASE("quadrature for eta <= -1 agrees with Monte Carlo") {
  const EnvParams env = derive_env(Feller{1.5, 1.0}, 1.0);  // eta = -2
  const MCEstimate a = survival_prob(1.0, 2.0, env, ProbOptions{});
  const MCEstimate b = survival_prob(1.0, 2.0, env, mc(4000, 4));
  CHECK(std::fabs(a.value - b.value) <= std::max(3.0 * b.se, 1e-2));
}

TEST_CASE("exact extinction probability") {
  CHECK(extinction_prob_exact_stable(1.0, derive_env(Feller{-0.5, 1.0}, 1.0)) == 1.0);
  const EnvParams f = derive_env(Feller{1.5, 1.0}, 1.0);  // m = 1, eta = -2, k = 0.5
  CHECK(extinction_prob_exact_stable(2.0, f) == Approx(0.25).epsilon(1e-12));
  // beta = 1/2: E[exp(-z k Gamma^2)] against a direct quadrature
  const EnvParams s = derive_env(1.0, 1.0, 0.5, 0.25);  // m = 0.5, eta = -2, k = 1
  const double direct = [] {
    double sum = 0.0;
    const int n = 200000;
    const double h = 40.0 / n;
    for (int i = 1; i < n; ++i) {
      const double x = i * h;
      sum += (i % 2 ? 4.0 : 2.0) * std::exp(-0.7 * x * x) * x * std::exp(-x);
    }
    return sum * h / 3.0;
  }();
  CHECK(extinction_prob_exact_stable(0.7, s) == Approx(direct).epsilon(1e-9));
}

TEST_CASE("extinction bounds") {
  const ExtinctionBounds z0 = extinction_bounds(0.0, 1.0, 1.0, 1.0, 0.0);
  CHECK(z0.lower == 1.0);
  CHECK(*z0.remark_upper == 1.0);
  const ExtinctionBounds b = extinction_bounds(1.0, 1.0, 1.0, 1.0, 0.0);
  CHECK(b.remark_lower == Approx(std::pow(1.5, -2.0)));
  CHECK(*b.remark_upper == Approx(std::pow(1.5, -2.0)));
  CHECK(b.lower == Approx(0.25));
  CHECK(!extinction_bounds(1.0, 1.0, 1.0, 1.0, std::nullopt).remark_upper);
  const ExtinctionBounds k = extinction_bounds(1.0, 1.0, 1.0, 1.0, 0.5);
  CHECK(*k.remark_upper > k.remark_lower);
}

TEST_CASE("survival constants in closed form") {
  const AsymptoticConstant s = asympt_survival_constant(1.0, derive_env(Feller{-1.5, 1.0}, 1.0));
  CHECK(s.constant == Approx(1.0).epsilon(1e-14));
  CHECK(s.rate == RateKind::Exp);
  CHECK(s.scale(2.0) == Approx(std::exp(3.0)));
  const AsymptoticConstant i = asympt_survival_constant(1.0, derive_env(Feller{-0.5, 1.0}, 1.0));
  CHECK(i.constant == Approx(std::sqrt(2.0) / (2.0 * std::sqrt(kPi))).epsilon(1e-14));
  const AsymptoticConstant p = asympt_survival_constant(2.0, derive_env(Feller{1.5, 1.0}, 1.0));
  CHECK(p.constant == Approx(0.75).epsilon(1e-12));
  CHECK(p.rate == RateKind::None);
}

TEST_CASE("critical constant") {
  // beta = 1: int (1 - e^{-qx}) e^{-x}/x dx = log(1 + q)
  CHECK(critical_integral(0.5, 1.0) == Approx(std::log(1.5)).epsilon(1e-12));
  const AsymptoticConstant c = asympt_survival_constant(1.0, derive_env(Feller{0.5, 1.0}, 1.0));
  CHECK(c.constant == Approx(0.32351434970376889).epsilon(1e-10));
  CHECK(c.rate == RateKind::SqrtT);
}

TEST_CASE("phi_eta against nested quadrature") {
  CHECK(phi_eta(1.0, 1.0) == Approx(0.09911666173350135).epsilon(1e-8));
  CHECK(phi_eta(0.1, 1.0) == Approx(16.560045766852458).epsilon(1e-5));
  CHECK(phi_eta(2.0, 0.5) == Approx(0.061226855757318656).epsilon(1e-6));
  CHECK_THROWS_AS(phi_eta(1.0, -0.5), Error);
}

TEST_CASE("phi_eta tail decays like xi e^{-eta xi}") {
  // For large v the density is dominated by e^{-v}; check positivity across scales instead.
  for (double v : {1e-6, 1e-3, 1.0, 10.0}) CHECK(phi_eta(v, 1.0) > 0.0);
}

TEST_CASE("weakly subcritical constant") {
  const AsymptoticConstant w = asympt_survival_constant(1.0, derive_env(Feller{0.0, 1.0}, 1.0));
  CHECK(w.rate == RateKind::T32Exp);
  CHECK(w.rate_param == Approx(0.125));
  CHECK(w.constant == Approx(3.7282003661).epsilon(1e-5));
}

TEST_CASE("explosion constants") {
  const EnvParams env = derive_env(Stable{0.25, -0.5, -1.0}, 1.0);
  CHECK(asympt_explosion_constant(0.5, env).constant == Approx(0.057836188155377194).epsilon(1e-9));
  CHECK(asympt_explosion_constant(1.0, env).constant == Approx(0.023861606660393192).epsilon(1e-9));
  CHECK(asympt_explosion_constant(2.0, env).constant == Approx(0.007650604434233409).epsilon(1e-9));
}

TEST_CASE("Neveu long-term behavior") {
  const NeveuReport r = neveu_longterm(1.0, 1.0);
  CHECK(r.p_w0 == Approx(0.5229853014456189).epsilon(1e-10));
  CHECK(r.infinite_mean);
  CHECK(r.conservative);
  CHECK(neveu_longterm(0.0, 1.0).p_w0 == 1.0);
  CHECK(neveu_longterm(1.0, 1e-6).p_w0 == Approx(std::exp(-1.0)).epsilon(1e-5));
  const MCEstimate m = neveu_w0_mc(1.0, 1.0, 100000, 9);
  CHECK(std::fabs(m.value - r.p_w0) <= 3.0 * m.se);
}
