#include <cmath>

#include "doctest.h"

#include "cbbre/error.hpp"
#include "cbbre/rng.hpp"
#include "cbbre/simulator.hpp"
#include "cbbre/stats.hpp"

using namespace cbbre;
using doctest::Approx;

TEST_CASE("zero initial mass stays at zero") {
  SimConfig cfg;
  cfg.record_times = {0.5, 1.0};
  const SimPath p = simulate_cbbre(Feller{0.5, 1.0}, 1.0, 0.0, 1.0, cfg, 0);
  REQUIRE(p.T0.has_value());
  CHECK(*p.T0 == 0.0);
  CHECK(p.z_final == 0.0);
  CHECK(p.snapshots == std::vector<double>{0.0, 0.0});
}

TEST_CASE("paths are reproducible per (seed, path)") {
  SimConfig cfg;
  cfg.seed = 17;
  cfg.record_full = true;
  const Mechanism m = Stable{0.1, 0.5, 1.0};
  const SimPath a = simulate_cbbre(m, 1.0, 1.0, 0.5, cfg, 3);
  const SimPath b = simulate_cbbre(m, 1.0, 1.0, 0.5, cfg, 3);
  CHECK(a.z == b.z);
  CHECK(sim_path_csv(a) == sim_path_csv(b));
  CHECK(sim_path_csv(a).rfind("t,Z,K\n", 0) == 0);
  CHECK(a.z.front() == 1.0);
}

TEST_CASE("stable jumps vanish at zero mass") {
  Rng rng(1, 0, Stream::Jumps);
  CHECK(simulate_stable_jumps(0.0, 0.01, 0.5, 1.0, 1e-3, rng) == 0.0);
  CHECK(simulate_stable_jumps(0.0, 0.01, -0.5, -1.0, 1e-3, rng) == 0.0);
}

TEST_CASE("event detection") {
  const Events a = detect_events({0.0, 0.1, 0.2}, {0.0, 0.0, 0.0}, 1e-10, 1e9);
  REQUIRE(a.T0.has_value());
  CHECK(*a.T0 == 0.0);
  const Events b = detect_events({0.0, 1.0, 2.0, 3.0}, {1.0, 10.0, 100.0, 1000.0}, 1e-10, 50.0);
  REQUIRE(b.Tinf.has_value());
  CHECK(*b.Tinf == 2.0);
  CHECK(!b.T0);
}

TEST_CASE("mean of a Feller CBBRE grows like exp(alpha t)") {
  // E[Z_t] = z0 E[e^{K0_t}] = z0 e^{alpha t}
  const double alpha = 0.3, T = 1.0;
  SimConfig cfg;
  cfg.seed = 23;
  cfg.dt = 2e-3;
  std::vector<double> z(6000), w(6000);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const SimPath p = simulate_cbbre(Feller{alpha, 1.0}, 0.5, 1.0, T, cfg, i);
    z[i] = p.z_final;
    w[i] = p.z_final * std::exp(-(p.k_final + alpha * T));
  }
  const MeanSE m = mean_se(z), s = mean_se(w);
  CHECK(std::fabs(m.mean - std::exp(alpha * T)) <= 3.0 * m.se + 1e-2);
  CHECK(std::fabs(s.mean - 1.0) <= 3.0 * s.se + 1e-2);
}

TEST_CASE("subcritical Feller paths die out") {
  SimConfig cfg;
  cfg.seed = 29;
  cfg.dt = 1e-2;
  std::vector<SimPath> paths;
  for (std::size_t i = 0; i < 300; ++i) paths.push_back(simulate_cbbre(Feller{-1.0, 1.0}, 1.0, 1.0, 30.0, cfg, i));
  const MartingaleReport rep = martingale_diagnostics(paths, 1.0, -1.0);
  CHECK(rep.p_w0 >= 0.99);
  CHECK(rep.supermartingale_ok);
}

TEST_CASE("immigration keeps zero from absorbing") {
  ImmigrationMechanism imm;
  imm.d = 2.0;
  SimConfig cfg;
  cfg.seed = 31;
  cfg.record_times = {1.0};
  const SimPath p = simulate_cbibre(Feller{-1.0, 1.0}, imm, 1.0, 0.0, 1.0, cfg, 0);
  CHECK(!p.T0);
  CHECK(p.snapshots[0] > 0.0);
  ImmigrationMechanism none;
  const SimPath a = simulate_cbibre(Feller{-1.0, 1.0}, none, 1.0, 1.0, 1.0, cfg, 4);
  const SimPath b = simulate_cbbre(Feller{-1.0, 1.0}, 1.0, 1.0, 1.0, cfg, 4);
  CHECK(a.z_final == b.z_final);
}

TEST_CASE("negative-index stable mechanisms can explode") {
  SimConfig cfg;
  cfg.seed = 37;
  cfg.dt = 1e-3;
  cfg.m_expl = 1e6;
  int exploded = 0;
  for (std::size_t i = 0; i < 200; ++i) exploded += simulate_cbbre(Stable{0.25, -0.5, -1.0}, 1.0, 1.0, 2.0, cfg, i).Tinf ? 1 : 0;
  CHECK(exploded > 0);
}

TEST_CASE("configuration validation") {
  SimConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(simulate_cbbre(Feller{}, 1.0, 1.0, 1.0, cfg, 0), Error);
  CHECK_THROWS_AS(parse_scheme("rk4"), Error);
  CHECK(parse_scheme("log_split") == Scheme::LogSplit);
}
