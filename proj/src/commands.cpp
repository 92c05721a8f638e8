#include "cbbre/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "cbbre/conditioned.hpp"
#include "cbbre/error.hpp"
#include "cbbre/immigration.hpp"
#include "cbbre/longterm.hpp"
#include "cbbre/parallel.hpp"
#include "cbbre/simulator.hpp"
#include "cbbre/stats.hpp"
#include "cbbre/verify.hpp"

namespace cbbre {

using nlohmann::json;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string Table::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += '\n';
  }
  return out;
}

void write_artifacts(const RunResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream f(fs::path(dir) / "summary.json");
    f << r.summary.dump(2) << '\n';
  }
  for (const auto& t : r.tables) {
    std::ofstream f(fs::path(dir) / (t.name + ".csv"));
    f << t.csv();
  }
}

namespace {

json est_json(const MCEstimate& e) {
  return {{"value", e.value}, {"se", e.se}, {"n", e.n}, {"seed", e.seed}, {"dt", e.dt}, {"method", e.method}};
}

ProbOptions prob_options(const ExperimentConfig& c, ProbMethod m) {
  ProbOptions o;
  o.method = m;
  o.n_mc = c.num.n_mc;
  o.seed = c.seed;
  o.steps = c.num.steps;
  o.rule = c.num.rule;
  o.workers = c.workers;
  return o;
}

std::vector<ProbMethod> methods(const ExperimentConfig& c) {
  if (c.method == "mc") return {ProbMethod::MonteCarlo};
  if (c.method == "quadrature") return {ProbMethod::Quadrature};
  return {ProbMethod::Quadrature, ProbMethod::MonteCarlo};
}

json base_summary(const ExperimentConfig& c) {
  json s;
  s["schema_version"] = kSchemaVersion;
  s["kind"] = c.kind;
  s["mechanism"] = mechanism_json(c.mech);
  s["environment"] = {{"sigma", c.sigma}};
  if (c.imm) s["immigration"] = immigration_json(*c.imm);
  s["manifest"] = {{"seed", c.seed},
                   {"n_mc", c.num.n_mc},
                   {"n_paths", c.num.n_paths},
                   {"steps", c.num.steps},
                   {"dt", c.num.dt},
                   {"rule", to_string(c.num.rule)},
                   {"scheme", to_string(c.num.scheme)}};
  return s;
}

// Two estimates of the same probability agree within max(3 SE, 1e-2).
void dual_check(RunResult& r, const std::vector<MCEstimate>& est, const std::string& what) {
  if (est.size() < 2) return;
  const double se = std::hypot(est[0].se, est[1].se);
  if (std::fabs(est[0].value - est[1].value) > std::max(3.0 * se, 1e-2)) r.failures.push_back(what);
}

RunResult run_probability(const ExperimentConfig& c, bool explosion) {
  RunResult r;
  const EnvParams env = derive_env(c.mech, c.sigma);
  require(explosion ? env.beta < 0.0 : env.beta > 0.0, ErrorKind::Parameter,
          explosion ? "explosion needs beta in (-1,0)" : "survival needs beta in (0,1]");
  r.summary = base_summary(c);
  const Regime reg = classify_regime(env);
  r.summary["regime"] = explosion ? to_string(*reg.explosion) : to_string(reg.survival);
  r.summary["env"] = {{"m", env.m}, {"eta", env.eta}, {"k", env.k}};
  Table tab{explosion ? "explosion" : "survival", {"z", "t", "P", "SE", "method"}, {}};
  json results = json::array();
  for (double z : c.z) {
    for (double t : c.t) {
      std::vector<MCEstimate> est;
      for (ProbMethod m : methods(c)) {
        const ProbOptions o = prob_options(c, m);
        est.push_back(explosion ? explosion_prob(z, t, env, o) : survival_prob(z, t, env, o));
        tab.rows.push_back({fmt(z), fmt(t), fmt(est.back().value), fmt(est.back().se), est.back().method});
        results.push_back({{"z", z}, {"t", t}, {"estimate", est_json(est.back())}});
      }
      dual_check(r, est, "method agreement at z=" + fmt(z) + " t=" + fmt(t));
    }
  }
  r.summary["results"] = results;
  r.tables.push_back(std::move(tab));
  return r;
}

RunResult run_asymptotics(const ExperimentConfig& c) {
  RunResult r;
  const EnvParams env = derive_env(c.mech, c.sigma);
  const Regime reg = classify_regime(env);
  const bool expl = env.beta < 0.0;
  const std::string regime = expl ? to_string(*reg.explosion) : to_string(reg.survival);
  if (c.regime != "auto" && c.regime != regime)
    throw Error(ErrorKind::Regime, "requested regime '" + c.regime + "' but parameters give '" + regime + "'");
  r.summary = base_summary(c);
  r.summary["regime"] = regime;
  r.summary["env"] = {{"m", env.m}, {"eta", env.eta}, {"k", env.k}};
  Table consts{"constants", {"z", "regime", "rate", "constant", "method"}, {}};
  Table trend{"trend", {"z", "t", "scaled_P", "constant", "rel_gap"}, {}};
  json results = json::array();
  const ProbOptions q = prob_options(c, ProbMethod::Quadrature);
  for (double z : c.z) {
    const AsymptoticConstant a = expl ? asympt_explosion_constant(z, env) : asympt_survival_constant(z, env);
    consts.rows.push_back({fmt(z), a.regime, a.rate_string(), fmt(a.constant), a.method});
    json tr = json::array();
    double last_gap = 0.0;
    for (double t : c.t) {
      const double p = expl ? explosion_prob(z, t, env, q).value : survival_prob(z, t, env, q).value;
      const double s = p * a.scale(t);
      last_gap = std::fabs(s / a.constant - 1.0);
      trend.rows.push_back({fmt(z), fmt(t), fmt(s), fmt(a.constant), fmt(last_gap)});
      tr.push_back({{"t", t}, {"P", p}, {"scaled_P", s}, {"rel_gap", last_gap}});
    }
    if (c.gap_tol && !(last_gap <= *c.gap_tol)) r.failures.push_back("trend gap at z=" + fmt(z));
    results.push_back({{"z", z},
                       {"constant", a.constant},
                       {"rate", a.rate_string()},
                       {"method", a.method},
                       {"trend", tr}});
  }
  r.summary["results"] = results;
  r.tables.push_back(std::move(consts));
  r.tables.push_back(std::move(trend));
  return r;
}

std::vector<double> sorted_times(const ExperimentConfig& c) {
  std::vector<double> t = c.t;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

RunResult run_simulate(const ExperimentConfig& c) {
  RunResult r;
  r.summary = base_summary(c);
  const std::vector<double> times = sorted_times(c);
  SimConfig sc = c.sim_config();
  sc.record_times = times;
  const std::size_t n = c.num.n_paths;
  const std::string method = std::string(c.imm ? "cbibre_" : "cbbre_") + to_string(sc.scheme);
  Table tab{"simulate", {"z", "t", "quantity", "estimate", "stderr", "method"}, {}};
  json results = json::array();
  for (double z : c.z) {
    std::vector<SimPath> paths(n);
    parallel_for(n, c.workers, [&](std::size_t i) {
      paths[i] = c.imm ? simulate_cbibre(c.mech, *c.imm, c.sigma, z, times.back(), sc, i)
                       : simulate_cbbre(c.mech, c.sigma, z, times.back(), sc, i);
    });
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double t = times[j];
      std::vector<double> alive(n), exploded(n), finite_z;
      for (std::size_t i = 0; i < n; ++i) {
        const SimPath& p = paths[i];
        exploded[i] = (p.Tinf && *p.Tinf <= t) ? 1.0 : 0.0;
        alive[i] = (!exploded[i] && !(p.T0 && *p.T0 <= t)) ? 1.0 : 0.0;
        if (!exploded[i] && std::isfinite(p.snapshots[j])) finite_z.push_back(p.snapshots[j]);
      }
      const MeanSE a = mean_se(alive), e = mean_se(exploded);
      const MeanSE mz = finite_z.empty() ? MeanSE{} : mean_se(finite_z);
      for (const auto& [q, v] : std::vector<std::pair<std::string, MeanSE>>{
               {"P_alive", a}, {"P_exploded", e}, {"mean_Z_finite", mz}}) {
        tab.rows.push_back({fmt(z), fmt(t), q, fmt(v.mean), fmt(v.se), method});
        results.push_back({{"z", z}, {"t", t}, {"quantity", q}, {"estimate", v.mean}, {"stderr", v.se}});
      }
    }
  }
  r.summary["manifest"]["method"] = method;
  r.summary["results"] = results;
  r.tables.push_back(std::move(tab));
  return r;
}

RunResult run_qprocess(const ExperimentConfig& c) {
  RunResult r;
  const EnvParams env = derive_env(c.mech, c.sigma);
  const HTransform ht = HTransform::qprocess(env);
  r.summary = base_summary(c);
  r.summary["regime"] = to_string(classify_regime(env).survival);
  r.summary["theta"] = ht.theta;
  if (env.m <= -env.sigma * env.sigma + 1e-12) {
    const CbibreSetup q = qprocess_as_cbibre(env);
    r.summary["cbibre"] = {{"mechanism", mechanism_json(q.mech)}, {"immigration", immigration_json(q.imm)}};
  }
  const std::vector<double> times = sorted_times(c);
  SimConfig sc = c.sim_config();
  sc.record_times = times;
  const std::size_t n = c.num.n_paths;
  Table tab{"qprocess", {"z", "t", "quantity", "estimate", "stderr", "method"}, {}};
  json results = json::array();
  for (double z : c.z) {
    const double h0 = ht.h(z);
    std::vector<std::vector<double>> w(times.size(), std::vector<double>(n));
    parallel_for(n, c.workers, [&](std::size_t i) {
      const SimPath p = simulate_cbbre(c.mech, c.sigma, z, times.back(), sc, i);
      const std::vector<double> d = qprocess_weight(p, times, ht);
      for (std::size_t j = 0; j < times.size(); ++j) w[j][i] = d[j];
    });
    json rows = json::array();
    for (std::size_t j = 0; j < times.size(); ++j) {
      const MeanSE m = mean_se(w[j]);
      tab.rows.push_back({fmt(z), fmt(times[j]), "mean_D", fmt(m.mean), fmt(m.se), "simulation"});
      rows.push_back({{"t", times[j]}, {"mean_D", m.mean}, {"se", m.se}});
      if (std::fabs(m.mean - h0) > 3.0 * m.se)
        r.failures.push_back("martingale mean at z=" + fmt(z) + " t=" + fmt(times[j]));
    }
    tab.rows.push_back({fmt(z), "0", "U", fmt(h0), "0", "h_function"});
    results.push_back({{"z", z}, {"U", h0}, {"martingale", rows}});
  }
  r.summary["results"] = results;
  r.tables.push_back(std::move(tab));
  return r;
}

RunResult run_conditioned(const ExperimentConfig& c) {
  RunResult r;
  const EnvParams env = derive_env(c.mech, c.sigma);
  r.summary = base_summary(c);
  const Regime reg = classify_regime(env);
  require(reg.conditioned.has_value(), ErrorKind::Regime, "conditioning on eventual extinction needs m > 0");
  r.summary["regime"] = to_string(*reg.conditioned);
  Table tab{"conditioned", {"z", "t", "P", "SE", "method"}, {}};
  Table consts{"constants", {"z", "regime", "rate", "constant", "method"}, {}};
  json results = json::array();
  for (double z : c.z) {
    const AsymptoticConstant a = asympt_conditioned_constant(z, env);
    consts.rows.push_back({fmt(z), a.regime, a.rate_string(), fmt(a.constant), a.method});
    json rows = json::array();
    for (double t : c.t) {
      std::vector<MCEstimate> est;
      for (ProbMethod m : methods(c)) {
        est.push_back(conditioned_survival(z, t, env, prob_options(c, m)));
        tab.rows.push_back({fmt(z), fmt(t), fmt(est.back().value), fmt(est.back().se), est.back().method});
        rows.push_back({{"t", t}, {"estimate", est_json(est.back())}});
      }
      dual_check(r, est, "method agreement at z=" + fmt(z) + " t=" + fmt(t));
    }
    results.push_back({{"z", z}, {"U_star", U_star(z, env)}, {"constant", a.constant}, {"rate", a.rate_string()},
                       {"probabilities", rows}});
  }
  r.summary["results"] = results;
  r.tables.push_back(std::move(tab));
  r.tables.push_back(std::move(consts));
  return r;
}

RunResult run_immigration(const ExperimentConfig& c) {
  require(c.imm.has_value(), ErrorKind::Parameter, "immigration experiments need an immigration block");
  RunResult r;
  r.summary = base_summary(c);
  const double m = criticality(c.mech, c.sigma);
  const auto* st = std::get_if<Stable>(&c.mech);
  const bool closed = st && c.imm->stable && c.imm->d == 0.0 && !c.imm->table && c.imm->stable->beta == st->beta;
  const std::size_t n = c.num.n_mc;
  Table tab{"immigration", {"z", "lambda", "t", "estimate", "stderr", "method"}, {}};
  json results = json::array();
  for (double z : c.z) {
    for (double lam : c.lambda) {
      for (double t : c.t) {
        std::vector<double> ode(n), cf(closed ? n : 0);
        parallel_for(n, c.workers, [&](std::size_t i) {
          const EnvPath env = sample_env_path(c.sigma, m, t, c.num.steps, c.seed, i, PathFlavor::K0);
          ode[i] = cbibre_cond_laplace(z, lam, t, env, c.mech, *c.imm);
          if (closed) cf[i] = stable_cbibre_laplace(z, lam, t, env, st->beta, st->c, c.imm->stable->kappa);
        });
        const MeanSE a = mean_se(ode);
        tab.rows.push_back({fmt(z), fmt(lam), fmt(t), fmt(a.mean), fmt(a.se), "mc_environment_ode"});
        json row{{"z", z}, {"lambda", lam}, {"t", t}, {"laplace", a.mean}, {"se", a.se}};
        if (closed) {
          double worst = 0.0;
          for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::fabs(ode[i] - cf[i]));
          const MeanSE b = mean_se(cf);
          tab.rows.push_back({fmt(z), fmt(lam), fmt(t), fmt(b.mean), fmt(b.se), "mc_environment_closed_form"});
          row["closed_form"] = b.mean;
          row["max_pathwise_diff"] = worst;
          if (!(worst <= c.num.tol))
            r.failures.push_back("closed form at z=" + fmt(z) + " lambda=" + fmt(lam) + " t=" + fmt(t));
        }
        results.push_back(row);
      }
    }
  }
  r.summary["results"] = results;
  if (st && c.imm->stable && c.imm->stable->beta == st->beta && c.imm->d == 0.0 && !c.imm->table) {
    const EnvParams env = derive_env(c.mech, c.sigma);
    ImmLongtermOptions lo;
    lo.seed = c.seed;
    lo.workers = c.workers;
    const ImmLongtermReport rep = cbibre_longterm(c.z.front(), c.lambda.front(), env, c.imm->stable->kappa, lo);
    json j{{"verdict", rep.verdict}, {"z", c.z.front()}, {"lambda", c.lambda.front()}};
    if (env.m > 0.0) {
      json tr = json::array();
      for (std::size_t i = 0; i < rep.horizons.size(); ++i)
        tr.push_back({{"T", rep.horizons[i]}, {"estimate", est_json(rep.transform[i])}});
      j["truncated_transform"] = tr;
      j["limit_transform"] = rep.transform_gamma;
    } else {
      json sm = json::array();
      for (std::size_t i = 0; i < rep.sim_times.size(); ++i)
        sm.push_back({{"t", rep.sim_times[i]}, {"median_Z", rep.median_z[i]}, {"frac_above", rep.frac_above[i]}});
      j["simulation"] = sm;
    }
    r.summary["longterm"] = j;
  }
  r.tables.push_back(std::move(tab));
  return r;
}

RunResult run_verify(const ExperimentConfig& c) {
  RunResult r;
  VerifyOptions vo;
  vo.seed = c.seed;
  vo.workers = c.workers;
  const std::vector<int> ids = suite_criteria(c.suite);
  r.summary["schema_version"] = kSchemaVersion;
  r.summary["kind"] = "verify";
  r.summary["suite"] = c.suite;
  r.summary["manifest"] = {{"seed", c.seed}};
  Table tab{"verify", {"id", "name", "pass"}, {}};
  json crit = json::array();
  for (int id : ids) {
    const CheckResult cr = run_criterion(id, vo);
    crit.push_back(to_json(cr));
    tab.rows.push_back({std::to_string(cr.id), cr.name, cr.pass ? "true" : "false"});
    if (!cr.pass) r.failures.push_back("criterion " + std::to_string(cr.id) + " (" + cr.name + ")");
  }
  r.summary["criteria"] = crit;
  r.tables.push_back(std::move(tab));
  return r;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult r;
  if (cfg.kind == "simulate") r = run_simulate(cfg);
  else if (cfg.kind == "survival") r = run_probability(cfg, false);
  else if (cfg.kind == "explosion") r = run_probability(cfg, true);
  else if (cfg.kind == "asymptotics") r = run_asymptotics(cfg);
  else if (cfg.kind == "qprocess") r = run_qprocess(cfg);
  else if (cfg.kind == "conditioned") r = run_conditioned(cfg);
  else if (cfg.kind == "immigration") r = run_immigration(cfg);
  else if (cfg.kind == "verify") r = run_verify(cfg);
  else throw Error(ErrorKind::Schema, "unknown experiment kind '" + cfg.kind + "'");
  r.exit_code = r.failures.empty() ? 0 : 1;
  r.summary["failures"] = r.failures;
  r.summary["pass"] = r.failures.empty();
  return r;
}

}  // namespace cbbre
