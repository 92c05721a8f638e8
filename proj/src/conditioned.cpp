#include "cbbre/conditioned.hpp"

#include <algorithm>
#include <cmath>

#include "cbbre/error.hpp"
#include "cbbre/parallel.hpp"
#include "cbbre/quadrature.hpp"

namespace cbbre {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_stable(const EnvParams& env) {
  require(env.beta > 0.0 && env.beta <= 1.0, ErrorKind::Parameter, "conditioning needs beta in (0,1]");
  require(env.sigma > 0.0 && env.k > 0.0, ErrorKind::Parameter, "conditioning needs sigma > 0 and k > 0");
}

void require_qprocess(const EnvParams& env) {
  require_stable(env);
  require(classify_regime(env).survival != SurvivalRegime::Supercritical, ErrorKind::Regime,
          "the Q-process needs m <= 0; use the eventual-extinction transform for m > 0");
}

void require_super(const EnvParams& env) {
  require_stable(env);
  require(classify_regime(env).survival == SurvivalRegime::Supercritical, ErrorKind::Regime,
          "conditioning on eventual extinction needs m > 0");
}

// Lower log-v cut for int y phi_eta(y) dy near 0, where the integrand behaves like y^{-eta/2}.
double h_phi_lower_cut(double eta) {
  const double d = std::max(0.05, 1.0 - 0.5 * eta);
  return std::clamp(-40.0 / d, -400.0, -40.0);
}

}  // namespace

double theta(const EnvParams& env) {
  require_qprocess(env);
  const double s2 = env.sigma * env.sigma;
  switch (classify_regime(env).survival) {
    case SurvivalRegime::Critical: return 0.0;
    case SurvivalRegime::WeaklySubcritical: return env.m * env.m / (2.0 * s2);
    default: return -(2.0 * env.m + s2) / 2.0;
  }
}

UFunction::UFunction(const EnvParams& env) : env_(env) {
  require_qprocess(env);
  regime_ = classify_regime(env).survival;
  if (regime_ == SurvivalRegime::WeaklySubcritical) {
    const double d = std::max(0.05, 1.0 / env.beta - 0.5 * env.eta);
    phi_ = std::make_shared<const PhiTable>(env.eta, std::clamp(-40.0 / d, -400.0, -40.0));
  }
}

double UFunction::operator()(double z) const {
  require(z >= 0.0, ErrorKind::Parameter, "U needs z >= 0");
  if (z == 0.0) return 0.0;
  if (!std::isfinite(z)) return z;
  const double b = env_.beta, s = env_.sigma, zk = z * env_.k;
  switch (regime_) {
    case SurvivalRegime::Critical:
      return std::sqrt(2.0) / (std::sqrt(kPi) * b * s) * critical_integral(zk, b);
    case SurvivalRegime::WeaklySubcritical:
      return 8.0 / (b * b * b * s * s * s) *
             phi_->integrate([&](double v) { return -std::expm1(-zk * std::pow(v, 1.0 / b)); });
    case SurvivalRegime::IntermediatelySubcritical:
      return zk * std::sqrt(2.0) * std::tgamma(1.0 / b) / (std::sqrt(kPi) * b * s);
    case SurvivalRegime::StronglySubcritical:
      return zk * std::exp(std::lgamma(env_.eta - 1.0 / b) - std::lgamma(env_.eta - 2.0 / b));
    case SurvivalRegime::Supercritical: break;
  }
  throw Error(ErrorKind::Regime, "U is undefined for m > 0");
}

double U(double z, const EnvParams& env) { return UFunction(env)(z); }

double U_star(double z, const EnvParams& env) {
  require_super(env);
  return extinction_prob_exact_stable(z, env);
}

const char* to_string(HKind k) { return k == HKind::Qprocess ? "qprocess" : "eventual_extinction"; }

HTransform HTransform::qprocess(const EnvParams& env) {
  HTransform h{HKind::Qprocess, env, cbbre::theta(env), std::make_shared<const UFunction>(env)};
  return h;
}

HTransform HTransform::eventual_extinction(const EnvParams& env) {
  require_super(env);
  return HTransform{HKind::EventualExtinction, env, 0.0, nullptr};
}

double HTransform::h(double z) const {
  if (kind == HKind::Qprocess) return (*u)(z);
  return std::isfinite(z) ? U_star(z, env) : 0.0;
}

std::vector<double> qprocess_weight(const SimPath& path, const std::vector<double>& times, const HTransform& ht) {
  require(times.size() == path.snapshots.size(), ErrorKind::Parameter, "snapshot count does not match the times");
  std::vector<double> d(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double z = path.snapshots[j];
    const bool absorbed = path.T0 && *path.T0 <= times[j];
    d[j] = absorbed ? ht.weight(times[j], 0.0) : ht.weight(times[j], z);
  }
  return d;
}

double h_fun(double x, double y, double k, double beta) {
  const double a = k * std::pow(x, 1.0 / beta);
  // b - a = k x^{1/beta} ((1 + y/x)^{1/beta} - 1), kept accurate for y << x
  const double d = x > 0.0 ? a * std::expm1(std::log1p(y / x) / beta) : k * std::pow(y, 1.0 / beta);
  return -std::exp(-a) * std::expm1(-d);
}

HBounds h_bounds(double x, double y, double eps, double k, double beta) {
  require(eps > 0.0 && x >= 0.0 && y >= 0.0, ErrorKind::Parameter, "h bounds need x, y >= 0 and eps > 0");
  const double p = 1.0 / beta - 1.0;
  const double pre = k / beta * std::exp(-k * std::pow(x, 1.0 / beta));
  HBounds r;
  r.value = h_fun(x, y, k, beta);
  r.lower = pre * std::pow(x, p) * y;
  r.upper = pre * (std::pow(x + eps, p) * y + std::pow(x / eps + 1.0, p) * std::pow(y, 1.0 / beta));
  return r;
}

MCEstimate conditioned_survival(double z, double t, const EnvParams& env, const ProbOptions& opt) {
  require_super(env);
  require(z >= 0.0 && t >= 0.0, ErrorKind::Parameter, "z and t must be nonnegative");
  MCEstimate e;
  e.seed = opt.seed;
  if (z == 0.0) {
    e.method = "trivial";
    return e;
  }
  if (t == 0.0) {
    e.value = 1.0;
    e.method = "trivial";
    return e;
  }
  const double b = env.beta, k = env.k, zb = std::pow(z, b), us = U_star(z, env);
  const double nu = b * b * env.sigma * env.sigma * t / 4.0;
  // h(x, y) is O(y) for small y; the Gamma expectation is taken of h / min(1, y) to keep relative accuracy.
  auto g = [&](double y) {
    const double s = std::min(1.0, y);
    if (s <= 0.0) return 0.0;
    return s * gamma_expectation(-env.eta, [&](double x) { return h_fun(zb * x, y, k, b) / s; }, 1e-12).value / us;
  };
  if (opt.method == ProbMethod::Quadrature) {
    const MYDensity d(nu, -env.eta, opt.my);
    e.value = d.expect([&](double v) { return g(zb * v); });
    e.method = "density_quadrature";
    return e;
  }
  std::vector<double> x(opt.n_mc);
  parallel_for(opt.n_mc, opt.workers, [&](std::size_t i) {
    Rng rng(opt.seed, i, Stream::Auxiliary);
    const double y = zb / (2.0 * sample_exp_functional(-env.eta, nu, opt.steps, rng, opt.rule));
    x[i] = g(y);
  });
  const MeanSE m = mean_se(x);
  e.value = m.mean;
  e.se = m.se;
  e.n = opt.n_mc;
  e.dt = t / static_cast<double>(opt.steps);
  e.method = "mc_environment_gamma_quadrature";
  return e;
}

AsymptoticConstant asympt_conditioned_constant(double z, const EnvParams& env) {
  require_super(env);
  require(z > 0.0, ErrorKind::Parameter, "z must be positive");
  const Regime reg = classify_regime(env);
  const double b = env.beta, s = env.sigma, k = env.k, zk = z * k, zb = std::pow(z, b);
  const double us = U_star(z, env);
  AsymptoticConstant a;
  a.regime = to_string(*reg.conditioned);
  switch (*reg.conditioned) {
    case ConditionedRegime::WeaklySuper: {
      a.rate = RateKind::T32Exp;
      a.rate_param = env.m * env.m / (2.0 * s * s);
      const double ae = -env.eta;
      const PhiTable tab(ae, h_phi_lower_cut(ae));
      const double inner = gamma_expectation(
          ae, [&](double x) { return tab.integrate([&](double y) { return h_fun(zb * x, zb * y, k, b); }); }, 1e-10)
                               .value;
      a.constant = 8.0 / (b * b * b * s * s * s * us) * inner;
      a.method = "quadrature";
      break;
    }
    case ConditionedRegime::IntermediatelySuper: {
      a.rate = RateKind::Exp;
      a.sqrt_t = true;
      a.rate_param = 0.5 * b * b * s * s;
      // int x^{1/beta} e^{-zk x^{1/beta}} e^{-x} dx = Gamma(1/beta + 1) E[exp{-zk Gamma_{1/beta+1}^{1/beta}}]
      const double I = std::tgamma(1.0 / b + 1.0) *
                       gamma_expectation(1.0 / b + 1.0, [&](double x) { return std::exp(-zk * std::pow(x, 1.0 / b)); },
                                         1e-13)
                           .value;
      a.constant = zk * std::sqrt(2.0) / (b * b * s * std::sqrt(kPi) * us) * I;
      a.method = "gamma-expectation";
      break;
    }
    case ConditionedRegime::StronglySuper: {
      a.rate = RateKind::Exp;
      a.rate_param = 0.5 * b * (2.0 * env.m - b * s * s);
      const double I =
          gamma_expectation(-env.eta,
                            [&](double x) { return std::pow(x, 1.0 / b - 1.0) * std::exp(-zk * std::pow(x, 1.0 / b)); },
                            1e-13)
              .value;
      a.constant = -zk * (env.eta + 2.0) / (b * us) * I;
      a.method = "gamma-expectation";
      break;
    }
  }
  return a;
}

CbibreSetup qprocess_as_cbibre(const EnvParams& env) {
  require_stable(env);
  const double s2 = env.sigma * env.sigma;
  require(env.m <= -s2 + 1e-12, ErrorKind::Regime, "the CBIBRE identification is only available for m <= -sigma^2");
  CbibreSetup out;
  out.sigma = env.sigma;
  if (env.beta == 1.0) {
    out.mech = Feller{env.alpha + s2, env.c};
    out.imm.d = 2.0 * env.c;
  } else {
    out.mech = Stable{env.alpha + s2, env.beta, env.c};
    out.imm.stable = StableImmigration{env.beta, env.c * (env.beta + 1.0)};
  }
  return out;
}

}  // namespace cbbre
