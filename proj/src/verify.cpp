#include "cbbre/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "cbbre/conditioned.hpp"
#include "cbbre/environment.hpp"
#include "cbbre/error.hpp"
#include "cbbre/flow.hpp"
#include "cbbre/immigration.hpp"
#include "cbbre/longterm.hpp"
#include "cbbre/parallel.hpp"
#include "cbbre/simulator.hpp"
#include "cbbre/stats.hpp"

namespace cbbre {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t scaled(std::size_t n, const VerifyOptions& o) {
  return std::max<std::size_t>(100, static_cast<std::size_t>(std::llround(static_cast<double>(n) * o.scale)));
}

// Each criterion draws from its own seed so suites can run in any order.
std::uint64_t sub_seed(const VerifyOptions& o, int id, int k = 0) {
  return o.seed + 1000ull * static_cast<std::uint64_t>(id) + static_cast<std::uint64_t>(k);
}

json est_json(const MCEstimate& e) {
  return {{"value", e.value}, {"se", e.se}, {"n", e.n}, {"seed", e.seed}, {"dt", e.dt}, {"method", e.method}};
}

bool within(double a, double sa, double b, double sb, double k = 3.0) {
  return std::fabs(a - b) <= k * std::hypot(sa, sb);
}

CheckResult closed_form_vs_ode(const VerifyOptions& o) {
  CheckResult r{1, "closed form vs backward ODE", true, json::object()};
  const double sigma = 1.0, t = 1.0;
  const std::vector<double> lambdas{0.1, 1.0, 10.0};
  struct Case {
    std::string name;
    Mechanism mech;
  };
  const std::vector<Case> cases{{"neveu", Neveu{}},
                                {"feller", Feller{0.3, 1.0}},
                                {"stable_0.5", Stable{0.2, 0.5, 1.0}},
                                {"stable_-0.5", Stable{0.2, -0.5, -1.0}}};
  const std::uint64_t seed = sub_seed(o, 1);
  for (const auto& c : cases) {
    double worst = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
      const EnvPath env = sample_env_path(sigma, -0.5 * sigma * sigma, t, 1000, seed, i, PathFlavor::K);
      for (double lam : lambdas) {
        const double ode = solve_backward(c.mech, lam, t, env).v0();
        double cf = 0.0;
        if (std::holds_alternative<Neveu>(c.mech)) {
          cf = closed_form_neveu(lam, t, env);
        } else if (const auto* f = std::get_if<Feller>(&c.mech)) {
          cf = closed_form_feller(lam, t, env, f->alpha, f->gamma2);
        } else {
          const auto& s = std::get<Stable>(c.mech);
          cf = closed_form_stable(lam, t, env, s.beta, s.c, s.alpha);
        }
        worst = std::max(worst, std::fabs(ode - cf));
      }
    }
    r.detail[c.name] = {{"max_abs_diff", worst}, {"paths", 100}};
    r.pass = r.pass && worst <= 1e-6;
  }
  r.detail["tolerance"] = 1e-6;
  return r;
}

CheckResult branching_property(const VerifyOptions& o) {
  CheckResult r{2, "conditional branching property", true, json::object()};
  GeneralCB g;
  g.a = 0.1;
  g.gamma2 = 0.5;
  for (int i = 0; i <= 40; ++i) {
    const double x = 0.01 * std::pow(1000.0, i / 40.0);
    g.mu.x.push_back(x);
    g.mu.density.push_back(std::pow(x, -2.5));
  }
  const std::vector<std::pair<std::string, Mechanism>> cases{
      {"feller", Feller{0.3, 1.0}}, {"stable_0.5", Stable{0.2, 0.5, 1.0}}, {"general", g}};
  const double z1 = 0.7, z2 = 1.3, t = 1.0;
  const std::uint64_t seed = sub_seed(o, 2);
  for (const auto& [name, mech] : cases) {
    double worst = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
      const EnvPath env = sample_env_path(1.0, -0.5, t, 400, seed, i, PathFlavor::K);
      for (double lam : {0.5, 2.0}) {
        const double joint = cond_laplace(z1 + z2, lam, t, env, mech);
        const double prod = cond_laplace(z1, lam, t, env, mech) * cond_laplace(z2, lam, t, env, mech);
        worst = std::max(worst, std::fabs(joint - prod));
      }
    }
    r.detail[name] = {{"max_abs_diff", worst}, {"paths", 100}};
    r.pass = r.pass && worst <= 1e-12;
  }
  r.detail["tolerance"] = 1e-12;
  return r;
}

CheckResult dufresne(const VerifyOptions& o) {
  CheckResult r{3, "Dufresne identity", false, json::object()};
  const std::size_t n = scaled(100000, o), steps = 5000;
  const double T = 50.0;
  const std::uint64_t seed = sub_seed(o, 3);
  std::vector<double> x1(n), x2(n);
  parallel_for(n, o.workers, [&](std::size_t i) {
    Rng rng(seed, i, Stream::Auxiliary);
    const double v = 1.0 / (2.0 * sample_exp_functional(-2.0, T, steps, rng));
    x1[i] = v;
    x2[i] = v * v;
  });
  const MeanSE m1 = mean_se(x1), m2 = mean_se(x2);
  const bool ok1 = std::fabs(m1.mean - 2.0) <= 3.0 * m1.se, ok2 = std::fabs(m2.mean - 6.0) <= 3.0 * m2.se;
  r.pass = ok1 && ok2;
  r.detail = {{"T", T},
              {"steps", steps},
              {"n", n},
              {"seed", seed},
              {"mean", m1.mean},
              {"mean_se", m1.se},
              {"second_moment", m2.mean},
              {"second_moment_se", m2.se},
              {"target", {2.0, 6.0}}};
  return r;
}

CheckResult lemma1(const VerifyOptions& o) {
  CheckResult r{4, "exponential functional moment identity", true, json::object()};
  const std::vector<std::array<double, 3>> grid{{1.0, 1.0, 1.0}, {0.0, 0.5, 2.0}, {-1.0, 2.0, 0.5}};
  const std::size_t n = scaled(50000, o);
  json rows = json::array();
  int k = 0;
  for (const auto& g : grid) {
    const Lemma1Report rep = lemma1_moments(g[0], g[1], g[2], n, sub_seed(o, 4, k++), 400, o.workers);
    rows.push_back({{"eta", g[0]},
                    {"p", g[1]},
                    {"t", g[2]},
                    {"lhs", est_json(rep.lhs)},
                    {"rhs", est_json(rep.rhs)},
                    {"inequality_lhs", est_json(rep.ineq_lhs)},
                    {"inequality_rhs", est_json(rep.inequality_rhs)},
                    {"identity_ok", rep.identity_ok},
                    {"inequality_ok", rep.inequality_ok}});
    r.pass = r.pass && rep.identity_ok && rep.inequality_ok;
  }
  r.detail["grid"] = rows;
  return r;
}

CheckResult density(const VerifyOptions& o) {
  CheckResult r{5, "exponential functional density", true, json::object()};
  const std::size_t n = scaled(20000, o);
  json rows = json::array();
  int k = 0;
  for (const auto& [nu, eta] : std::vector<std::pair<double, double>>{{1.0, 0.0}, {2.0, 1.0}}) {
    const MYDensity d(nu, eta);
    const std::uint64_t seed = sub_seed(o, 5, k++);
    std::vector<double> v(n);
    parallel_for(n, o.workers, [&](std::size_t i) {
      Rng rng(seed, i, Stream::Auxiliary);
      v[i] = 1.0 / (2.0 * sample_exp_functional(eta, nu, 2000, rng));
    });
    const double ks = ks_vs_cdf(v, [&](double x) { return d.cdf(x); });
    const double norm = d.normalization();
    const bool ok = std::fabs(norm - 1.0) <= 1e-3 && ks < 0.02;
    rows.push_back({{"nu", nu}, {"eta", eta}, {"normalization", norm}, {"ks", ks}, {"n", n}, {"seed", seed}, {"ok", ok}});
    r.pass = r.pass && ok;
  }
  r.detail["cases"] = rows;
  return r;
}

// Dual-method agreement on a (z, t) grid for survival (beta > 0) or explosion (beta < 0).
CheckResult dual_method(int id, const std::string& name, const Mechanism& mech, const std::vector<double>& ts,
                        const VerifyOptions& o) {
  CheckResult r{id, name, true, json::object()};
  const EnvParams env = derive_env(mech, 1.0);
  const bool expl = env.beta < 0.0;
  json rows = json::array();
  for (double t : ts) {
    for (double z : {0.5, 1.0, 2.0}) {
      ProbOptions q;
      ProbOptions m;
      m.method = ProbMethod::MonteCarlo;
      m.n_mc = scaled(20000, o);
      m.steps = 1000;
      m.seed = sub_seed(o, id);
      m.workers = o.workers;
      const MCEstimate a = expl ? explosion_prob(z, t, env, q) : survival_prob(z, t, env, q);
      const MCEstimate b = expl ? explosion_prob(z, t, env, m) : survival_prob(z, t, env, m);
      const double tol = std::max(3.0 * b.se, 1e-2);
      bool ok = std::fabs(a.value - b.value) <= tol;
      if (expl) ok = ok && a.value > 0.0 && b.value > 0.0;
      rows.push_back({{"z", z}, {"t", t}, {"quadrature", est_json(a)}, {"mc", est_json(b)}, {"tol", tol}, {"ok", ok}});
      r.pass = r.pass && ok;
    }
  }
  r.detail = {{"m", env.m}, {"eta", env.eta}, {"k", env.k}, {"grid", rows}};
  return r;
}

CheckResult trend(int id, const std::string& name, double m, double expected, const VerifyOptions&) {
  CheckResult r{id, name, true, json::object()};
  const Mechanism mech = Feller{m + 0.5, 1.0};
  const EnvParams env = derive_env(mech, 1.0);
  const AsymptoticConstant c = asympt_survival_constant(1.0, env);
  json rows = json::array();
  double prev = std::numeric_limits<double>::infinity(), last_gap = 0.0;
  bool monotone = true;
  for (double t : {10.0, 20.0, 30.0, 40.0}) {
    const double p = survival_prob(1.0, t, env, ProbOptions{}).value;
    const double s = p * c.scale(t), gap = std::fabs(s / c.constant - 1.0);
    monotone = monotone && gap <= prev + 1e-9;
    prev = gap;
    last_gap = gap;
    rows.push_back({{"t", t}, {"P", p}, {"scaled", s}, {"rel_gap", gap}});
  }
  const bool const_ok = std::fabs(c.constant - expected) <= 1e-12 * std::max(1.0, expected);
  r.pass = const_ok && monotone && last_gap <= 0.1;
  r.detail = {{"regime", c.regime},        {"rate", c.rate_string()}, {"constant", c.constant},
              {"expected", expected},      {"trend", rows},           {"monotone", monotone},
              {"gap_at_40", last_gap},     {"gap_tol", 0.1}};
  return r;
}

CheckResult ustar_identity(const VerifyOptions&) {
  CheckResult r{10, "extinction constant identity", true, json::object()};
  double worst_id = 0.0, worst_feller = 0.0;
  for (double beta : {1.0, 0.5}) {
    for (double m : {0.25, 0.5, 1.0, 2.0}) {
      const EnvParams env = derive_env(1.0, m + 0.5, beta, 1.0);
      for (double z : {0.5, 1.0, 2.0, 5.0}) {
        const double a = 1.0 - asympt_survival_constant(z, env).constant;
        const double u = U_star(z, env), e = extinction_prob_exact_stable(z, env);
        worst_id = std::max({worst_id, std::fabs(a - u), std::fabs(u - e)});
        if (beta == 1.0) worst_feller = std::max(worst_feller, std::fabs(u - std::pow(1.0 + z * env.k, env.eta)));
      }
    }
  }
  r.pass = worst_id <= 1e-10 && worst_feller <= 1e-12;
  r.detail = {{"max_identity_diff", worst_id}, {"max_feller_diff", worst_feller}, {"tol_identity", 1e-10},
              {"tol_feller", 1e-12}};
  return r;
}

CheckResult extinction_bounds_check(const VerifyOptions&) {
  CheckResult r{11, "extinction bounds", true, json::object()};
  std::size_t n = 0;
  double min_strict = std::numeric_limits<double>::infinity(), worst_remark = 0.0;
  for (double g2 : {0.5, 1.0, 2.0}) {
    for (double m : {0.25, 0.5, 1.0, 2.0}) {
      const EnvParams env = derive_env(1.0, m + 0.5, 1.0, g2);
      for (double z : {0.5, 1.0, 2.0, 5.0}) {
        const double exact = extinction_prob_exact_stable(z, env);
        const ExtinctionBounds b = extinction_bounds(z, 1.0, m, g2, 0.0);
        const bool ok = b.lower < exact && b.remark_lower <= exact + 1e-12 && exact <= *b.remark_upper + 1e-12;
        min_strict = std::min(min_strict, exact - b.lower);
        worst_remark = std::max(worst_remark, std::fabs(*b.remark_upper - exact));
        r.pass = r.pass && ok;
        ++n;
      }
    }
  }
  r.detail = {{"cases", n}, {"min_exact_minus_lower", min_strict}, {"max_remark_upper_minus_exact", worst_remark}};
  return r;
}

// Mean of the h-transform weight at the snapshot times against its value at time 0.
json weight_martingale(const EnvParams& env, const HTransform& ht, const VerifyOptions& o, std::uint64_t seed,
                       bool& pass) {
  const std::vector<double> times{0.5, 1.0, 2.0};
  const std::size_t n = scaled(100000, o);
  const double z0 = 1.0;
  const Mechanism mech = Feller{env.alpha, env.c};
  SimConfig cfg;
  cfg.seed = seed;
  cfg.record_times = times;
  std::vector<std::vector<double>> d(times.size(), std::vector<double>(n));
  parallel_for(n, o.workers, [&](std::size_t i) {
    const SimPath p = simulate_cbbre(mech, env.sigma, z0, times.back(), cfg, i);
    const std::vector<double> w = qprocess_weight(p, times, ht);
    for (std::size_t j = 0; j < times.size(); ++j) d[j][i] = w[j];
  });
  const double target = ht.weight(0.0, z0);
  json rows = json::array();
  for (std::size_t j = 0; j < times.size(); ++j) {
    const MeanSE m = mean_se(d[j]);
    const bool ok = std::fabs(m.mean - target) <= 3.0 * m.se;
    pass = pass && ok;
    rows.push_back({{"t", times[j]}, {"mean", m.mean}, {"se", m.se}, {"ok", ok}});
  }
  return {{"m", env.m}, {"theta", ht.theta}, {"h_z0", target}, {"n", n}, {"seed", seed}, {"dt", cfg.dt}, {"times", rows}};
}

CheckResult qprocess_martingale(const VerifyOptions& o) {
  CheckResult r{12, "Q-process martingale", true, json::object()};
  json rows = json::array();
  int k = 0;
  for (double m : {-0.5, -1.0, -2.0}) {
    const EnvParams env = derive_env(1.0, m + 0.5, 1.0, 1.0);
    rows.push_back(weight_martingale(env, HTransform::qprocess(env), o, sub_seed(o, 12, k++), r.pass));
  }
  r.detail["cases"] = rows;
  return r;
}

CheckResult ustar_martingale(const VerifyOptions& o) {
  CheckResult r{13, "eventual-extinction martingale", true, json::object()};
  const EnvParams env = derive_env(1.0, 1.5, 1.0, 1.0);
  r.detail = weight_martingale(env, HTransform::eventual_extinction(env), o, sub_seed(o, 13), r.pass);
  return r;
}

CheckResult conditioned_vs_simulation(const VerifyOptions& o) {
  CheckResult r{14, "conditioned survival formula vs simulation", false, json::object()};
  const double m = 0.5, t = 1.0, z = 1.0;
  const EnvParams env = derive_env(1.0, m + 0.5, 1.0, 1.0);
  const Mechanism mech = Feller{env.alpha, 1.0};
  const std::size_t n = scaled(100000, o);

  ProbOptions po;
  po.method = ProbMethod::MonteCarlo;
  po.n_mc = n;
  po.steps = 400;
  po.seed = sub_seed(o, 14, 0);
  po.workers = o.workers;
  const MCEstimate formula = conditioned_survival(z, t, env, po);

  // Run to t, then continue on a separate stream until absorption or Z > stop_above.
  SimConfig fine;
  fine.seed = sub_seed(o, 14, 1);
  SimConfig coarse = fine;
  coarse.dt = 5e-3;
  coarse.stop_above = 1e5;
  const double t_max = 200.0;
  const std::uint64_t offset = 1ull << 40;
  std::vector<int> absorbed(n), alive_at_t(n);
  parallel_for(n, o.workers, [&](std::size_t i) {
    const SimPath a = simulate_cbbre(mech, env.sigma, z, t, fine, i);
    if (a.T0) {
      absorbed[i] = 1;
      return;
    }
    alive_at_t[i] = 1;
    const SimPath b = simulate_cbbre(mech, env.sigma, a.z_final, t_max, coarse, i + offset);
    absorbed[i] = b.T0 ? 1 : 0;
  });
  std::size_t n_abs = 0, n_both = 0, undecided = 0;
  for (std::size_t i = 0; i < n; ++i) {
    n_abs += static_cast<std::size_t>(absorbed[i]);
    n_both += static_cast<std::size_t>(absorbed[i] && alive_at_t[i]);
    undecided += static_cast<std::size_t>(!absorbed[i] && alive_at_t[i]);
  }
  const double f = static_cast<double>(n_both) / static_cast<double>(n_abs);
  const double se = std::sqrt(f * (1.0 - f) / static_cast<double>(n_abs));
  r.pass = within(formula.value, formula.se, f, se);
  r.detail = {{"formula", est_json(formula)},
              {"simulation", {{"value", f}, {"se", se}, {"n_paths", n}, {"n_absorbed", n_abs}, {"seed", fine.seed},
                              {"dt", fine.dt}, {"continuation_dt", coarse.dt}, {"stop_above", coarse.stop_above},
                              {"t_max", t_max}, {"survivors_not_absorbed", undecided}}},
              {"U_star", U_star(z, env)}};
  return r;
}

CheckResult qprocess_dual(const VerifyOptions& o) {
  CheckResult r{15, "Q-process as CBIBRE", false, json::object()};
  const double t = 1.0, z0 = 1.0;
  const EnvParams env = derive_env(1.0, -2.0 + 0.5, 1.0, 1.0);
  const HTransform ht = HTransform::qprocess(env);
  const CbibreSetup q = qprocess_as_cbibre(env);
  const std::size_t n = scaled(10000, o);
  const std::vector<double> times{t};

  SimConfig cd;
  cd.seed = sub_seed(o, 15, 0);
  cd.record_times = times;
  std::vector<double> direct(n);
  parallel_for(n, o.workers, [&](std::size_t i) {
    direct[i] = simulate_cbibre(q.mech, q.imm, q.sigma, z0, t, cd, i).snapshots[0];
  });

  // Reweighted unconditioned paths, in batches until the effective sample size reaches n.
  SimConfig cw = cd;
  cw.seed = sub_seed(o, 15, 1);
  const Mechanism base = Feller{env.alpha, env.c};
  std::vector<double> zs, ws;
  const std::size_t cap = 40 * n;
  while (zs.size() < cap && (zs.empty() || effective_sample_size(ws) < static_cast<double>(n))) {
    const std::size_t lo = zs.size();
    zs.resize(lo + n);
    ws.resize(lo + n);
    parallel_for(n, o.workers, [&](std::size_t i) {
      const SimPath p = simulate_cbbre(base, env.sigma, z0, t, cw, lo + i);
      zs[lo + i] = p.snapshots[0];
      ws[lo + i] = qprocess_weight(p, times, ht)[0];
    });
  }
  const double ess = effective_sample_size(ws);
  const double ks = ks_weighted(zs, ws, direct);
  r.pass = ks < 0.03;
  r.detail = {{"ks", ks},
              {"tol", 0.03},
              {"n_direct", n},
              {"n_reweighted", zs.size()},
              {"ess", ess},
              {"cbibre", {{"alpha", env.alpha + 1.0}, {"immigration_drift", q.imm.d}}},
              {"seeds", {cd.seed, cw.seed}}};
  return r;
}

CheckResult stable_cbibre(const VerifyOptions& o) {
  CheckResult r{16, "stable CBIBRE closed form", true, json::object()};
  const double beta = 0.5, c = 1.0, kappa = 0.7, alpha = 0.7, sigma = 1.0, t = 1.0, z = 1.0;
  const double m = alpha - 0.5 * sigma * sigma;
  const Mechanism mech = Stable{alpha, beta, c};
  ImmigrationMechanism imm;
  imm.stable = StableImmigration{beta, kappa};
  const std::uint64_t seed = sub_seed(o, 16);
  double worst = 0.0;
  bool entrance_exact = true;
  for (std::size_t i = 0; i < 100; ++i) {
    const EnvPath env = sample_env_path(sigma, m, t, 1000, seed, i, PathFlavor::K0);
    for (double lam : {0.1, 1.0, 10.0}) {
      const double ode = cbibre_cond_laplace(z, lam, t, env, mech, imm);
      const double cf = stable_cbibre_laplace(z, lam, t, env, beta, c, kappa);
      worst = std::max(worst, std::fabs(ode - cf));
      entrance_exact = entrance_exact && entrance_law(lam, t, env, beta, c, kappa) ==
                                             stable_cbibre_laplace(0.0, lam, t, env, beta, c, kappa);
    }
  }
  r.pass = worst <= 1e-6 && entrance_exact;
  r.detail = {{"max_abs_diff", worst}, {"tol", 1e-6}, {"entrance_exact", entrance_exact}, {"paths", 100}};
  return r;
}

CheckResult neveu(const VerifyOptions& o) {
  CheckResult r{17, "Neveu long-term behavior", false, json::object()};
  const double sigma = 1.0, z = 1.0, T = 1.0;
  const std::size_t n = scaled(10000, o);
  SimConfig cfg;
  cfg.seed = sub_seed(o, 17, 0);
  std::vector<int> hit(n);
  std::vector<double> zmin(n);
  parallel_for(n, o.workers, [&](std::size_t i) {
    const SimPath p = simulate_cbbre(Neveu{}, sigma, z, T, cfg, i);
    hit[i] = p.T0 ? 1 : 0;
    zmin[i] = p.z_final;
  });
  const std::size_t absorbed = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  const double q = neveu_longterm(z, sigma).p_w0;
  const MCEstimate mc = neveu_w0_mc(z, sigma, scaled(100000, o), sub_seed(o, 17, 1));
  const bool agree = std::fabs(q - mc.value) <= 3.0 * mc.se;
  r.pass = absorbed == 0 && agree;
  r.detail = {{"absorptions", absorbed},
              {"paths", n},
              {"T", T},
              {"eps_abs", cfg.eps_abs},
              {"dt", cfg.dt},
              {"min_final_Z", *std::min_element(zmin.begin(), zmin.end())},
              {"p_w0_quadrature", q},
              {"p_w0_mc", est_json(mc)}};
  return r;
}

}  // namespace

CheckResult run_criterion(int id, const VerifyOptions& o) {
  switch (id) {
    case 1: return closed_form_vs_ode(o);
    case 2: return branching_property(o);
    case 3: return dufresne(o);
    case 4: return lemma1(o);
    case 5: return density(o);
    case 6: return dual_method(6, "survival formula, two methods", Feller{0.0, 1.0}, {1.2, 2.0, 4.0}, o);
    case 7: return dual_method(7, "explosion formula, two methods", Stable{0.25, -0.5, -1.0}, {5.0, 8.0, 16.0}, o);
    case 8: return trend(8, "strongly subcritical constant", -2.0, 1.0, o);
    case 9: return trend(9, "intermediately subcritical constant", -1.0, std::sqrt(2.0) * 0.5 / std::sqrt(kPi), o);
    case 10: return ustar_identity(o);
    case 11: return extinction_bounds_check(o);
    case 12: return qprocess_martingale(o);
    case 13: return ustar_martingale(o);
    case 14: return conditioned_vs_simulation(o);
    case 15: return qprocess_dual(o);
    case 16: return stable_cbibre(o);
    case 17: return neveu(o);
    default: break;
  }
  throw Error(ErrorKind::Parameter, "unknown criterion " + std::to_string(id));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"closed-forms", "branching",  "functionals", "survival",
                                              "constants",    "extinction", "martingales", "conditioned",
                                              "qprocess",     "neveu",      "acceptance"};
  return names;
}

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "closed-forms") return {1, 16};
  if (suite == "branching") return {2};
  if (suite == "functionals") return {3, 4, 5};
  if (suite == "survival") return {6, 7};
  if (suite == "constants") return {8, 9, 10};
  if (suite == "extinction") return {11};
  if (suite == "martingales") return {12, 13};
  if (suite == "conditioned") return {14};
  if (suite == "qprocess") return {15};
  if (suite == "neveu") return {17};
  if (suite == "acceptance") {
    std::vector<int> all(kCriteria);
    for (int i = 0; i < kCriteria; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    return all;
  }
  if (suite.rfind("criterion-", 0) == 0) {
    const int id = std::atoi(suite.c_str() + 10);
    if (id >= 1 && id <= kCriteria) return {id};
  }
  throw Error(ErrorKind::Schema, "unknown verification suite '" + suite + "'");
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  for (int id : suite_criteria(suite)) out.push_back(run_criterion(id, opt));
  return out;
}

json to_json(const CheckResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}};
}

}  // namespace cbbre
