#include <cmath>

#include "doctest.h"

#include "cbbre/environment.hpp"
#include "cbbre/error.hpp"
#include "cbbre/flow.hpp"
#include "cbbre/immigration.hpp"

using namespace cbbre;
using doctest::Approx;

namespace {

EnvPath zero_k0(double t, std::size_t n = 1) {
  std::vector<double> s(n + 1), v(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) s[i] = t * static_cast<double>(i) / static_cast<double>(n);
  return make_env_path(s, v, PathFlavor::K0, 0.0, 0.0);
}

ImmigrationMechanism stable_imm(double beta, double kappa) {
  ImmigrationMechanism imm;
  imm.stable = StableImmigration{beta, kappa};
  return imm;
}

}  // namespace

TEST_CASE("entrance law on the zero path") {
  CHECK(entrance_law(1.0, 1.0, zero_k0(1.0), 0.5, 1.0, 0.5) == Approx(1.0 / 1.5).epsilon(1e-14));
  CHECK(stable_cbibre_laplace(0.0, 1.0, 1.0, zero_k0(1.0), 0.5, 1.0, 0.5) == Approx(1.0 / 1.5).epsilon(1e-14));
  CHECK(entrance_law(0.0, 1.0, zero_k0(1.0), 0.5, 1.0, 0.5) == 1.0);
  CHECK(stable_functional(zero_k0(2.0), 2.0, 0.5) == Approx(2.0));
}

TEST_CASE("ODE pipeline matches the stable closed form") {
  const Mechanism mech = Stable{0.7, 0.5, 1.0};
  for (std::size_t i = 0; i < 5; ++i) {
    const EnvPath env = sample_env_path(1.0, 0.2, 1.0, 400, 12, i, PathFlavor::K0);
    for (double lam : {0.1, 1.0, 10.0}) {
      CHECK(cbibre_cond_laplace(1.0, lam, 1.0, env, mech, stable_imm(0.5, 0.7)) ==
            Approx(stable_cbibre_laplace(1.0, lam, 1.0, env, 0.5, 1.0, 0.7)).epsilon(1e-8));
    }
  }
}

TEST_CASE("no immigration reduces to the CBBRE transform") {
  const EnvPath env = sample_env_path(1.0, 0.2, 1.0, 400, 13, 0, PathFlavor::K0);
  const Mechanism mech = Feller{0.7, 1.0};
  CHECK(cbibre_cond_laplace(1.3, 2.0, 1.0, env, mech, ImmigrationMechanism{}) ==
        Approx(cond_laplace(1.3, 2.0, 1.0, env, mech)).epsilon(1e-10));
  const double v = closed_form_stable(2.0, 1.0, env, 0.5, 1.0, 0.7);
  CHECK(stable_cbibre_laplace(1.3, 2.0, 1.0, env, 0.5, 1.0, 0.0) == Approx(std::exp(-1.3 * v)).epsilon(1e-13));
}

TEST_CASE("Feller with drift immigration") {
  // K0 = 0, psi0(u) = u^2, phi(u) = d u: v_s = lambda/(1 + lambda (t-s)), int phi(v) = d log(1 + lambda t)
  ImmigrationMechanism imm;
  imm.d = 2.0;
  const double got = cbibre_cond_laplace(0.5, 1.0, 1.0, zero_k0(1.0, 200), Feller{0.0, 1.0}, imm);
  CHECK(got == Approx(std::exp(-0.5 * 0.5) * std::pow(2.0, -2.0)).epsilon(1e-9));
}

TEST_CASE("boundary values") {
  const EnvPath env = sample_env_path(1.0, 0.2, 1.0, 100, 14, 0, PathFlavor::K0);
  CHECK(stable_cbibre_laplace(1.0, 0.0, 1.0, env, 0.5, 1.0, 0.7) == 1.0);
  CHECK(stable_cbibre_laplace(1.0, 1.0, 1e-9, env, 0.5, 1.0, 0.7) == Approx(std::exp(-1.0)).epsilon(1e-6));
  const EnvPath k = sample_env_path(1.0, -0.5, 1.0, 100, 14, 0, PathFlavor::K);
  CHECK_THROWS_AS(cbibre_cond_laplace(1.0, 1.0, 1.0, k, Feller{}, stable_imm(0.5, 1.0)), Error);
}

TEST_CASE("long-term behavior with immigration") {
  ImmLongtermOptions opt;
  opt.n_mc = 400;
  opt.seed = 5;
  const EnvParams sup = derive_env(1.0, 1.0, 0.5, 1.0);
  const ImmLongtermReport a = cbibre_longterm(1.0, 1.0, sup, 0.7, opt);
  CHECK(a.verdict == "converges");
  CHECK(a.transform_gamma > 0.0);
  CHECK(a.transform_gamma < 1.0);
  CHECK(std::fabs(a.transform.back().value - a.transform_gamma) <= 3.0 * a.transform.back().se + 5e-3);
  CHECK(cbibre_longterm(1.0, 0.0, sup, 0.7, opt).transform_gamma == Approx(1.0).epsilon(1e-14));

  opt.n_sim = 300;
  const ImmLongtermReport b = cbibre_longterm(1.0, 1.0, derive_env(1.0, 0.0, 0.5, 1.0), 0.7, opt);
  CHECK(b.verdict == "diverges");
  REQUIRE(b.median_z.size() == 3);
  CHECK(b.median_z[0] < b.median_z[1]);
  CHECK(b.median_z[1] < b.median_z[2]);
}
