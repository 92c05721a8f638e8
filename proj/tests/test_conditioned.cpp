#include <cmath>

#include "doctest.h"

#include "cbbre/conditioned.hpp"
#include "cbbre/error.hpp"
#include "cbbre/simulator.hpp"

using namespace cbbre;
using doctest::Approx;

namespace {

const double kPi = std::acos(-1.0);

EnvParams feller(double m) { return derive_env(Feller{m + 0.5, 1.0}, 1.0); }

ProbOptions mc(std::size_t n, std::uint64_t seed) {
  ProbOptions o;
  o.method = ProbMethod::MonteCarlo;
  o.n_mc = n;
  o.steps = 400;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("theta by regime") {
  CHECK(theta(feller(0.0)) == 0.0);
  CHECK(theta(feller(-0.5)) == Approx(0.125));
  CHECK(theta(feller(-1.0)) == Approx(0.5));
  CHECK(theta(feller(-2.0)) == Approx(1.5));
}

TEST_CASE("U in each subcritical branch") {
  CHECK(U(3.0, feller(-2.0)) == Approx(3.0).epsilon(1e-13));
  CHECK(U(1.0, feller(-1.0)) == Approx(std::sqrt(2.0) * 0.5 / std::sqrt(kPi)).epsilon(1e-13));
  CHECK(U(1.0, feller(0.0)) == Approx(std::sqrt(2.0 / kPi) * std::log(1.5)).epsilon(1e-10));
  const UFunction u(feller(-0.5));
  CHECK(u(1.0) == Approx(3.7282003661).epsilon(1e-5));
  for (const EnvParams& e : {feller(-2.0), feller(-1.0), feller(-0.5), feller(0.0)}) CHECK(U(0.0, e) == 0.0);
  CHECK_THROWS_AS(U(1.0, feller(0.5)), Error);
}

TEST_CASE("U_star") {
  CHECK(U_star(0.0, feller(1.0)) == 1.0);
  CHECK(U_star(2.0, feller(1.0)) == Approx(0.25).epsilon(1e-12));
  const EnvParams s = derive_env(1.0, 1.0, 0.5, 0.25);
  CHECK(U_star(0.7, s) == Approx(extinction_prob_exact_stable(0.7, s)).epsilon(1e-14));
}

TEST_CASE("h-transform weights") {
  const HTransform q = HTransform::qprocess(feller(-0.5));
  CHECK(q.weight(0.0, 1.3) == Approx(q.h(1.3)));
  CHECK(q.weight(2.0, 1.3) == Approx(std::exp(0.25) * q.h(1.3)));
  const HTransform e = HTransform::eventual_extinction(feller(1.0));
  CHECK(e.weight(5.0, 2.0) == Approx(0.25));
  CHECK_THROWS_AS(HTransform::eventual_extinction(feller(-1.0)), Error);

  SimConfig cfg;
  cfg.record_times = {0.0, 0.5};
  const SimPath p = simulate_cbbre(Feller{-1.5, 1.0}, 1.0, 2.0, 0.5, cfg, 0);
  const std::vector<double> w = qprocess_weight(p, cfg.record_times, HTransform::qprocess(feller(-2.0)));
  CHECK(w[0] == Approx(2.0));
}

TEST_CASE("h function") {
  CHECK(h_fun(1.0, 0.0, 0.5, 1.0) == 0.0);
  CHECK(h_fun(2.0, 1.0, 0.5, 1.0) == Approx(std::exp(-1.0) - std::exp(-1.5)).epsilon(1e-14));
  CHECK(h_fun(0.0, 4.0, 1.0, 0.5) == Approx(1.0 - std::exp(-16.0)).epsilon(1e-14));
  // no cancellation for tiny y
  CHECK(h_fun(1.0, 1e-12, 1.0, 1.0) == Approx(std::exp(-1.0) * 1e-12).epsilon(1e-10));
}

TEST_CASE("mean-value bounds on h") {
  for (double beta : {1.0, 0.8, 0.5}) {
    for (double x : {0.1, 1.0, 3.0}) {
      for (double y : {1e-4, 0.1, 1.0, 5.0}) {
        const HBounds b = h_bounds(x, y, 0.5, 0.7, beta);
        CHECK(b.value <= b.upper * (1.0 + 1e-12));
        CHECK(b.value >= 0.0);
      }
      // the lower bound is sharp to first order in y
      const HBounds s = h_bounds(x, 1e-7, 0.5, 0.7, beta);
      CHECK(s.lower / s.value == Approx(1.0).epsilon(1e-5));
    }
  }
  // away from y = 0 the lower bound can exceed h; with beta = 1 it always does
  const HBounds f = h_bounds(1.0, 1.0, 0.5, 0.7, 1.0);
  CHECK(f.lower > f.value);
}

TEST_CASE("conditioned survival") {
  const EnvParams env = feller(0.5);
  CHECK(conditioned_survival(1.0, 1e-4, env, mc(200, 1)).value == Approx(1.0).epsilon(1e-3));
  CHECK(conditioned_survival(0.0, 1.0, env, ProbOptions{}).value == 0.0);
  const MCEstimate a = conditioned_survival(1.0, 1.0, env, ProbOptions{});
  const MCEstimate b = conditioned_survival(1.0, 1.0, env, mc(4000, 2));
  CHECK(a.value > 0.0);
  CHECK(a.value < 1.0);
  CHECK(std::fabs(a.value - b.value) <= std::max(3.0 * b.se, 1e-2));
  CHECK_THROWS_AS(conditioned_survival(1.0, 1.0, feller(-0.5), ProbOptions{}), Error);
}

TEST_CASE("conditioned constants") {
  // m = sigma^2 with beta = 1: the constant is z k sqrt(2)/(sigma sqrt(pi)) exactly
  for (double z : {0.3, 1.0, 4.0})
    CHECK(asympt_conditioned_constant(z, feller(1.0)).constant ==
          Approx(z * 0.5 * std::sqrt(2.0 / kPi)).epsilon(1e-10));
  // Feller: the conditioned process at m behaves like the unconditioned one at -m
  CHECK(asympt_conditioned_constant(1.7, feller(2.0)).constant == Approx(1.7).epsilon(1e-10));
  CHECK(asympt_conditioned_constant(1.0, feller(0.5)).constant ==
        Approx(asympt_survival_constant(1.0, feller(-0.5)).constant).epsilon(1e-5));
  const AsymptoticConstant s = asympt_conditioned_constant(1.0, derive_env(1.0, 1.5, 0.5, 1.0));
  CHECK(s.constant > 0.0);
}

TEST_CASE("Feller symmetry at finite t") {
  const double a = conditioned_survival(1.0, 2.0, feller(0.5), ProbOptions{}).value;
  const double b = survival_prob(1.0, 2.0, feller(-0.5), ProbOptions{}).value;
  CHECK(a == Approx(b).epsilon(1e-6));
}

TEST_CASE("Q-process as a process with immigration") {
  const CbibreSetup q = qprocess_as_cbibre(feller(-2.0));
  const auto& f = std::get<Feller>(q.mech);
  CHECK(f.alpha == Approx(-0.5));
  CHECK(f.gamma2 == 1.0);
  CHECK(q.imm.d == Approx(2.0));
  const CbibreSetup s = qprocess_as_cbibre(derive_env(1.0, -1.0, 0.5, 1.0));
  REQUIRE(s.imm.stable.has_value());
  CHECK(s.imm.stable->kappa == Approx(1.5));
  CHECK(std::get<Stable>(s.mech).alpha == Approx(0.0));
  CHECK_THROWS_AS(qprocess_as_cbibre(feller(-0.5)), Error);
}
