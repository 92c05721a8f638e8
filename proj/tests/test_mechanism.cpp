#include <cmath>

#include "doctest.h"

#include "cbbre/error.hpp"
#include "cbbre/mechanism.hpp"

using namespace cbbre;
using doctest::Approx;

TEST_CASE("psi evaluations") {
  CHECK(eval_psi(Stable{1.0, 0.5, 2.0}, 1.0) == Approx(1.0));
  CHECK(eval_psi(Neveu{}, 1.0) == Approx(0.0));
  const Feller f{0.7, 2.0};
  REQUIRE(psi_largest_root(f).has_value());
  CHECK(*psi_largest_root(f) == Approx(0.35));
  CHECK(std::fabs(eval_psi(f, 0.35)) < 1e-14);
}

TEST_CASE("psi0 and capital phi") {
  CHECK(eval_psi0(Feller{0.3, 1.0}, 2.0) == Approx(4.0));
  CHECK(eval_psi0(Stable{0.3, 0.5, 1.0}, 1.0) == Approx(1.0));
  CHECK(eval_psi0(Feller{0.3, 1.0}, 0.0) == 0.0);
  CHECK(eval_capital_phi(Feller{0.0, 1.0}, 3.0) == Approx(3.0));
  CHECK(eval_capital_phi(Stable{0.0, 0.5, 1.0}, 4.0) == Approx(2.0));
}

TEST_CASE("environment parameters") {
  const EnvParams a = derive_env(1.0, 1.0, 0.5, 0.25);
  CHECK(a.m == Approx(0.5));
  CHECK(a.eta == Approx(-2.0));
  CHECK(a.k == Approx(1.0));
  const EnvParams b = derive_env(1.0, 0.5, 1.0, 1.0);
  CHECK(b.m == Approx(0.0));
  CHECK(b.eta == Approx(0.0));
  CHECK(b.k == Approx(0.5));
  const EnvParams c = derive_env(1.0, -1.0, 1.0, 1.0);
  CHECK(c.m == Approx(-1.5));
  CHECK(c.eta == Approx(3.0));
  const EnvParams f = derive_env(Feller{0.4, 2.0}, 0.5);
  CHECK(f.beta == 1.0);
  CHECK(f.c == 2.0);
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(derive_env(1.0, -1.0, 1.0, 1.0)).survival == SurvivalRegime::StronglySubcritical);
  CHECK(classify_regime(derive_env(1.0, 0.5, 1.0, 1.0)).survival == SurvivalRegime::Critical);
  CHECK(classify_regime(derive_env(1.0, 0.0, 1.0, 1.0)).survival == SurvivalRegime::WeaklySubcritical);
  CHECK(classify_regime(derive_env(1.0, -0.5, 1.0, 1.0)).survival == SurvivalRegime::IntermediatelySubcritical);
  const Regime r = classify_regime(derive_env(1.0, 1.0, 0.5, 1.0));
  CHECK(r.survival == SurvivalRegime::Supercritical);
  REQUIRE(r.conditioned.has_value());
  CHECK(*r.conditioned == ConditionedRegime::IntermediatelySuper);
  CHECK(classify_regime(derive_env(1.0, 0.25, -0.5, -1.0)).explosion.has_value());
}

TEST_CASE("invalid mechanisms are rejected") {
  CHECK_THROWS_AS(validate(Mechanism{Stable{0.0, 1.5, 1.0}}), Error);
  CHECK_THROWS_AS(validate(Mechanism{Stable{0.0, -0.5, 1.0}}), Error);
  CHECK_THROWS_AS(validate(Mechanism{Feller{0.0, -1.0}}), Error);
}

TEST_CASE("immigration mechanism") {
  ImmigrationMechanism imm;
  imm.d = 2.0;
  CHECK(eval_phi(imm, 1.5) == Approx(3.0));
  ImmigrationMechanism s;
  s.stable = StableImmigration{0.5, 0.7};
  CHECK(eval_phi(s, 4.0) == Approx(1.4));
  CHECK(ImmigrationMechanism{}.none());
}

TEST_CASE("psi is convex with psi(0) = -q") {
  GeneralCB g;
  g.q = 0.2;
  g.a = 0.1;
  g.gamma2 = 0.5;
  for (int i = 0; i <= 30; ++i) {
    g.mu.x.push_back(0.01 * std::pow(1000.0, i / 30.0));
    g.mu.density.push_back(std::pow(g.mu.x.back(), -2.5));
  }
  CHECK(eval_psi(g, 0.0) == Approx(-0.2));
  for (double u = 0.1; u < 5.0; u += 0.3) {
    const double h = 1e-3;
    CHECK(eval_psi(g, u + h) - 2.0 * eval_psi(g, u) + eval_psi(g, u - h) >= -1e-12);
  }
}
