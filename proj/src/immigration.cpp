#include "cbbre/immigration.hpp"

#include <algorithm>
#include <cmath>

#include "cbbre/error.hpp"
#include "cbbre/parallel.hpp"
#include "cbbre/quadrature.hpp"
#include "cbbre/simulator.hpp"

namespace cbbre {

namespace {

// Same path with the linear midpoint of every cell inserted.
EnvPath with_midpoints(const EnvPath& p) {
  std::vector<double> t, v;
  t.reserve(2 * p.t.size());
  v.reserve(2 * p.t.size());
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
    t.push_back(p.t[i]);
    v.push_back(p.values[i]);
    t.push_back(0.5 * (p.t[i] + p.t[i + 1]));
    v.push_back(0.5 * (p.values[i] + p.values[i + 1]));
  }
  t.push_back(p.t.back());
  v.push_back(p.values.back());
  EnvPath out = p;
  out.t = std::move(t);
  out.values = std::move(v);
  return out;
}

void require_k0(const EnvPath& env) {
  require(env.flavor == PathFlavor::K0, ErrorKind::Parameter, "immigration formulas take a K0 environment");
}

void require_stable_imm(double beta, double c, double kappa) {
  require(beta > 0.0 && beta <= 1.0, ErrorKind::Parameter, "stable immigration needs beta in (0,1]");
  require(c > 0.0 && kappa >= 0.0, ErrorKind::Parameter, "stable immigration needs c > 0 and kappa >= 0");
}

}  // namespace

double cbibre_cond_laplace(double z, double lambda, double t, const EnvPath& env, const Mechanism& mech,
                           const ImmigrationMechanism& imm, FlowOptions opt) {
  require_k0(env);
  validate(imm);
  require(!infinite_mean(mech), ErrorKind::Unsupported, "immigration needs a finite-mean mechanism");
  require(z >= 0.0 && lambda >= 0.0 && std::isfinite(lambda), ErrorKind::Parameter,
          "z and lambda must be finite and nonnegative");
  if (t == 0.0) return std::exp(-z * lambda);
  const EnvPath fine = with_midpoints(restrict_path(env, t));
  const FlowSolution sol = solve_backward(mech, lambda, t, fine, opt);
  double integral = 0.0;
  if (!imm.none()) {
    auto f = [&](std::size_t j) { return eval_phi(imm, sol.v[j] * std::exp(-fine.values[j])); };
    for (std::size_t j = 0; j + 2 < sol.v.size(); j += 2) {
      const double h = sol.s[j + 2] - sol.s[j];
      integral += h / 6.0 * (f(j) + 4.0 * f(j + 1) + f(j + 2));
    }
  }
  return std::exp(-z * sol.v0() - integral);
}

double stable_functional(const EnvPath& env, double t, double beta) {
  require_k0(env);
  return exp_functional(restrict_path(env, t), -beta, ExpRule::ExactLinear).value;
}

double entrance_law(double lambda, double t, const EnvPath& env, double beta, double c, double kappa) {
  require_stable_imm(beta, c, kappa);
  require(lambda >= 0.0, ErrorKind::Parameter, "lambda must be nonnegative");
  if (lambda == 0.0 || t == 0.0 || kappa == 0.0) return 1.0;
  if (!std::isfinite(lambda)) return 0.0;
  const double A = stable_functional(env, t, beta);
  return std::exp(-kappa / (beta * c) * std::log1p(beta * c * std::pow(lambda, beta) * A));
}

double stable_cbibre_laplace(double z, double lambda, double t, const EnvPath& env, double beta, double c,
                             double kappa) {
  require_stable_imm(beta, c, kappa);
  require(z >= 0.0, ErrorKind::Parameter, "z must be nonnegative");
  const double ent = entrance_law(lambda, t, env, beta, c, kappa);
  if (z == 0.0) return ent;
  if (lambda == 0.0) return 1.0;
  if (t == 0.0) return std::exp(-z * lambda);
  return std::exp(-z * closed_form_stable(lambda, t, env, beta, c, 0.0)) * ent;
}

ImmLongtermReport cbibre_longterm(double z, double lambda, const EnvParams& env, double kappa,
                                  const ImmLongtermOptions& opt) {
  const double b = env.beta, c = env.c;
  require_stable_imm(b, c, kappa);
  require(z >= 0.0 && lambda >= 0.0, ErrorKind::Parameter, "z and lambda must be nonnegative");
  require(env.sigma > 0.0, ErrorKind::Parameter, "sigma must be positive");
  ImmLongtermReport r;
  auto transform = [&](double A) {
    if (lambda == 0.0) return 1.0;
    const double lb = std::pow(lambda, b);
    const double branch = z == 0.0 ? 1.0 : std::exp(-z * std::pow(b * c * A + 1.0 / lb, -1.0 / b));
    return branch * std::exp(-kappa / (b * c) * std::log1p(b * c * lb * A));
  };

  if (env.m > 0.0) {
    r.verdict = "converges";
    r.T_trunc = std::log(1e6) / (b * env.m);
    r.horizons = opt.horizons;
    std::sort(r.horizons.begin(), r.horizons.end());
    require(!r.horizons.empty() && r.horizons.front() > 0.0, ErrorKind::Parameter, "horizons must be positive");
    const double Tmax = r.horizons.back();
    const auto N = static_cast<std::size_t>(std::ceil(Tmax * static_cast<double>(opt.steps_per_unit)));
    std::vector<std::vector<double>> x(r.horizons.size(), std::vector<double>(opt.n_mc));
    parallel_for(opt.n_mc, opt.workers, [&](std::size_t i) {
      const EnvPath p = sample_env_path(env.sigma, env.m, Tmax, N, opt.seed, i, PathFlavor::K0);
      for (std::size_t j = 0; j < r.horizons.size(); ++j) x[j][i] = transform(stable_functional(p, r.horizons[j], b));
    });
    for (std::size_t j = 0; j < r.horizons.size(); ++j) {
      const MeanSE m = mean_se(x[j]);
      r.transform.push_back(MCEstimate{m.mean, m.se, opt.n_mc, opt.seed, 1.0 / static_cast<double>(opt.steps_per_unit),
                                       "mc_environment"});
    }
    // int_0^inf e^{-beta K0} has the law of 2 / (beta^2 sigma^2 Gamma_{-eta}).
    const double scale = 2.0 / (b * b * env.sigma * env.sigma);
    r.transform_gamma = gamma_expectation(-env.eta, [&](double g) { return transform(scale / g); }, 1e-12).value;
    return r;
  }

  r.verdict = "diverges";
  r.sim_times = opt.sim_times;
  std::sort(r.sim_times.begin(), r.sim_times.end());
  require(!r.sim_times.empty() && r.sim_times.front() > 0.0, ErrorKind::Parameter, "simulation times must be positive");
  Mechanism mech = b == 1.0 ? Mechanism{Feller{env.alpha, c}} : Mechanism{Stable{env.alpha, b, c}};
  ImmigrationMechanism imm;
  if (b == 1.0) imm.d = kappa;
  else imm.stable = StableImmigration{b, kappa};
  SimConfig cfg;
  cfg.dt = opt.dt;
  cfg.seed = opt.seed;
  cfg.scheme = Scheme::LogSplit;
  cfg.record_times = r.sim_times;
  std::vector<SimPath> paths(opt.n_sim);
  parallel_for(opt.n_sim, opt.workers, [&](std::size_t i) {
    paths[i] = simulate_cbibre(mech, imm, env.sigma, z, r.sim_times.back(), cfg, i);
  });
  const double bound = 10.0 * z + 10.0;
  for (std::size_t j = 0; j < r.sim_times.size(); ++j) {
    std::vector<double> zs(opt.n_sim);
    std::size_t above = 0;
    for (std::size_t i = 0; i < opt.n_sim; ++i) {
      zs[i] = paths[i].snapshots[j];
      const double k0 = paths[i].env_snapshots[j] + env.alpha * r.sim_times[j];
      if (zs[i] * std::exp(-k0) > bound) ++above;
    }
    auto mid = zs.begin() + static_cast<std::ptrdiff_t>(zs.size() / 2);
    std::nth_element(zs.begin(), mid, zs.end());
    r.median_z.push_back(*mid);
    r.frac_above.push_back(static_cast<double>(above) / static_cast<double>(opt.n_sim));
  }
  return r;
}

}  // namespace cbbre
