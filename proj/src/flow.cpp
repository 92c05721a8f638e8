#include "cbbre/flow.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "cbbre/error.hpp"

namespace cbbre {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// int_0^h (u/h) e^{-u} du * h = 1 - e^{-h}(1+h)
double one_minus_exp_poly(double h) {
  if (h < 0.05) {
    double term = 1.0, sum = 0.0;
    for (int n = 1; n <= 9; ++n) {
      term *= -h / n;  // (-h)^n / n!
      if (n >= 2) sum += (n - 1) * term;
    }
    return sum;
  }
  return -std::expm1(-h) - h * std::exp(-h);
}

double log_add(double a, double b) {
  if (std::isinf(a) && a < 0) return b;
  if (std::isinf(b) && b < 0) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

StableView stable_view(const Mechanism& mech) {
  if (const auto* f = std::get_if<Feller>(&mech)) return {1.0, f->gamma2, f->alpha};
  if (const auto* s = std::get_if<Stable>(&mech)) return {s->beta, s->c, s->alpha};
  throw Error(ErrorKind::Unsupported, "closed form needs a Feller or stable mechanism");
}

EnvPath restrict_path(const EnvPath& env, double t) {
  require(t > 0.0, ErrorKind::Parameter, "horizon must be positive");
  const double T = env.horizon();
  require(t <= T * (1.0 + 1e-12), ErrorKind::Parameter, "environment grid does not cover [0,t]");
  if (t >= T * (1.0 - 1e-12)) return env;
  EnvPath out = env;
  out.t.clear();
  out.values.clear();
  for (std::size_t i = 0; i < env.t.size() && env.t[i] < t; ++i) {
    out.t.push_back(env.t[i]);
    out.values.push_back(env.values[i]);
  }
  if (t - out.t.back() < 1e-14 * t) {
    out.t.back() = t;
  } else {
    out.t.push_back(t);
    out.values.push_back(env.at(t));
  }
  if (out.t.size() == 1) {  // t inside the first cell and within rounding of 0
    out.t.push_back(t);
    out.values.push_back(env.at(t));
  }
  return out;
}

FlowSolution solve_backward(const Mechanism& mech, double lambda, double t, const EnvPath& env, FlowOptions opt) {
  validate(mech);
  require(lambda >= 0.0, ErrorKind::Parameter, "terminal value must be nonnegative");
  require(std::isfinite(lambda), ErrorKind::Method, "infinite terminal value: use the closed-form limits");
  const EnvPath p = restrict_path(env, t);
  const bool use0 = p.flavor == PathFlavor::K0;
  require(!(use0 && infinite_mean(mech)), ErrorKind::Unsupported, "K0 environment needs a finite-mean mechanism");

  auto rhs = [&](double d, double v) {
    v = std::max(v, 0.0);
    const double u = v * std::exp(-d);
    return std::exp(d) * (use0 ? eval_psi0(mech, u) : eval_psi(mech, u));
  };

  FlowSolution sol;
  sol.t = t;
  sol.lambda = lambda;
  sol.s = p.t;
  const std::size_t n = p.t.size();
  sol.v.assign(n, 0.0);
  sol.v[n - 1] = lambda;

  for (std::size_t i = n - 1; i > 0; --i) {
    const double ta = p.t[i - 1], tb = p.t[i];
    const double da = p.values[i - 1], db = p.values[i];
    auto delta = [&](double s) { return da + (db - da) * (s - ta) / (tb - ta); };
    auto rk4 = [&](double sb, double vb, double h) {
      const double k1 = rhs(delta(sb), vb);
      const double k2 = rhs(delta(sb - 0.5 * h), vb - 0.5 * h * k1);
      const double k3 = rhs(delta(sb - 0.5 * h), vb - 0.5 * h * k2);
      const double k4 = rhs(delta(sb - h), vb - h * k3);
      return vb - h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    };
    std::function<double(double, double, double, int)> advance = [&](double sb, double vb, double h, int depth) {
      const double full = rk4(sb, vb, h);
      const double half = rk4(sb - 0.5 * h, rk4(sb, vb, 0.5 * h), 0.5 * h);
      const double diff = half - full;
      const bool finite = std::isfinite(full) && std::isfinite(half);
      if (depth >= opt.max_halvings || (finite && std::fabs(diff) <= opt.tol * std::max(1.0, std::fabs(half))))
        return finite ? half + diff / 15.0 : half;
      ++sol.halvings;
      const double mid = advance(sb, vb, 0.5 * h, depth + 1);
      return advance(sb - 0.5 * h, mid, 0.5 * h, depth + 1);
    };
    double v = advance(tb, sol.v[i], tb - ta, 0);
    if (!std::isfinite(v) || v > opt.blowup_level) {
      sol.blowup_time = ta;
      for (std::size_t j = 0; j < i; ++j) sol.v[j] = std::numeric_limits<double>::infinity();
      return sol;
    }
    if (v < -opt.neg_tol) throw Error(ErrorKind::Solver, "backward flow went negative");
    if (v < 0.0 || std::fabs(v) < opt.tol_floor) v = 0.0;
    sol.v[i - 1] = v;
  }
  return sol;
}

std::string flow_csv(const FlowSolution& sol) {
  std::ostringstream os;
  os << "s,v\n";
  char buf[64];
  for (std::size_t i = 0; i < sol.s.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sol.s[i], sol.v[i]);
    os << buf;
  }
  return os.str();
}

double neveu_path_integral(const EnvPath& env, double t) {
  const EnvPath p = restrict_path(env, t);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < p.t.size(); ++i) {
    const double a = p.t[i], h = p.t[i + 1] - a;
    const double da = p.values[i], db = p.values[i + 1];
    sum += std::exp(-a) * (-da * std::expm1(-h) + (db - da) / h * one_minus_exp_poly(h));
  }
  return sum;
}

double closed_form_neveu(double lambda, double t, const EnvPath& env) {
  require(lambda > 0.0, ErrorKind::Domain, "Neveu closed form needs lambda > 0");
  require(env.flavor != PathFlavor::K0, ErrorKind::Unsupported, "Neveu has infinite mean: use a K path");
  if (std::isinf(lambda)) return lambda;
  return std::exp(neveu_path_integral(env, t) + std::exp(-t) * std::log(lambda));
}

double closed_form_stable(double lambda, double t, const EnvPath& env, double beta, double c, double alpha) {
  require(beta > -1.0 && beta <= 1.0 && beta != 0.0, ErrorKind::Parameter, "beta must lie in (-1,0) U (0,1]");
  require(beta * c > 0.0, ErrorKind::Parameter, "sign(c) must equal sign(beta)");
  require(lambda >= 0.0, ErrorKind::Parameter, "lambda must be nonnegative");
  const EnvPath p = restrict_path(env, t);
  const double a = p.flavor == PathFlavor::K0 ? 0.0 : alpha;
  const double tt = p.horizon();
  const double log_b = std::log(beta * c) + exp_functional(p, -beta, ExpRule::ExactLinear, -beta * a).log_value;
  double log_inner;
  if (lambda == 0.0) {
    if (beta > 0.0) return 0.0;
    log_inner = log_b;
  } else if (std::isinf(lambda)) {
    if (beta < 0.0) return lambda;
    log_inner = log_b;
  } else {
    log_inner = log_add(-beta * (std::log(lambda) + a * tt), log_b);
  }
  return std::exp(-log_inner / beta);
}

double closed_form_feller(double lambda, double t, const EnvPath& env, double alpha, double gamma2) {
  return closed_form_stable(lambda, t, env, 1.0, gamma2, alpha);
}

double flow_value(const Mechanism& mech, double lambda, double t, const EnvPath& env, FlowOptions opt) {
  validate(mech);
  require(lambda >= 0.0, ErrorKind::Parameter, "lambda must be nonnegative");
  return std::visit(overloaded{[&](const Neveu&) {
                                 if (lambda == 0.0) return 0.0;
                                 return closed_form_neveu(lambda, t, env);
                               },
                               [&](const Feller& f) { return closed_form_feller(lambda, t, env, f.alpha, f.gamma2); },
                               [&](const Stable& s) { return closed_form_stable(lambda, t, env, s.beta, s.c, s.alpha); },
                               [&](const GeneralCB&) { return solve_backward(mech, lambda, t, env, opt).v0(); }},
                    mech);
}

double cond_laplace(double z, double lambda, double t, const EnvPath& env, const Mechanism& mech, FlowOptions opt) {
  require(z >= 0.0, ErrorKind::Parameter, "initial mass must be nonnegative");
  if (z == 0.0) return 1.0;
  const double v = flow_value(mech, lambda, t, env, opt);
  return std::exp(-z * v);
}

CondProb cond_survival(double z, double t, const EnvPath& env, const Mechanism& mech) {
  require(z >= 0.0, ErrorKind::Parameter, "initial mass must be nonnegative");
  const StableView s = stable_view(mech);
  if (s.beta < 0.0) return {1.0, "survival trivial for beta < 0"};
  if (z == 0.0) return {0.0, ""};
  const double v = closed_form_stable(kLambdaInfinity, t, env, s.beta, s.c, s.alpha);
  return {-std::expm1(-z * v), ""};
}

CondProb cond_explosion(double z, double t, const EnvPath& env, const Mechanism& mech) {
  require(z >= 0.0, ErrorKind::Parameter, "initial mass must be nonnegative");
  const StableView s = stable_view(mech);
  if (s.beta > 0.0) return {0.0, "conservative for beta > 0"};
  if (z == 0.0) return {0.0, ""};
  const double v = closed_form_stable(0.0, t, env, s.beta, s.c, s.alpha);
  return {-std::expm1(-z * v), ""};
}

}  // namespace cbbre
