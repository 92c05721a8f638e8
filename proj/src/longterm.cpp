#include "cbbre/longterm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "cbbre/error.hpp"
#include "cbbre/parallel.hpp"
#include "cbbre/quadrature.hpp"

namespace cbbre {

namespace {

constexpr double kPi = 3.14159265358979323846;

MCEstimate deterministic(double v, const char* method) {
  MCEstimate e;
  e.value = v;
  e.method = method;
  return e;
}

// log of (beta c J)^{-1/beta} for the environment functional J = int_0^t e^{-beta K0_u} du.
double log_flow_limit(const EnvParams& env, double t, const ProbOptions& opt, std::size_t i) {
  const EnvPath p = sample_env_path(env.sigma, -0.5 * env.sigma * env.sigma, t, opt.steps, opt.seed, i, PathFlavor::K);
  const double lj = exp_functional(p, -env.beta, opt.rule, -env.beta * env.alpha).log_value;
  return -(std::log(env.beta * env.c) + lj) / env.beta;
}

}  // namespace

MCEstimate survival_prob(double z, double t, const EnvParams& env, const ProbOptions& opt) {
  require(env.beta > 0.0 && env.beta <= 1.0, ErrorKind::Parameter, "survival formula needs beta in (0,1]");
  require(z >= 0.0 && t >= 0.0, ErrorKind::Parameter, "z and t must be nonnegative");
  if (z == 0.0) return deterministic(0.0, "trivial");
  if (t == 0.0) return deterministic(1.0, "trivial");
  const double b = env.beta, k = env.k;
  if (opt.method == ProbMethod::Quadrature) {
    const MYDensity d(b * b * env.sigma * env.sigma * t / 4.0, env.eta, opt.my);
    const double val = d.expect([&](double v) { return -std::expm1(-k * z * std::pow(v, 1.0 / b)); });
    MCEstimate e = deterministic(val, "density_quadrature");
    e.seed = opt.seed;
    return e;
  }
  std::vector<double> x(opt.n_mc);
  parallel_for(opt.n_mc, opt.workers, [&](std::size_t i) {
    x[i] = -std::expm1(-z * std::exp(log_flow_limit(env, t, opt, i)));
  });
  const MeanSE m = mean_se(x);
  return MCEstimate{m.mean, m.se, opt.n_mc, opt.seed, t / static_cast<double>(opt.steps), "mc_environment"};
}

MCEstimate explosion_prob(double z, double t, const EnvParams& env, const ProbOptions& opt) {
  require(env.beta > -1.0 && env.beta < 0.0, ErrorKind::Parameter, "explosion formula needs beta in (-1,0)");
  require(z >= 0.0 && t >= 0.0, ErrorKind::Parameter, "z and t must be nonnegative");
  if (z == 0.0 || t == 0.0) return deterministic(0.0, "trivial");
  const double b = env.beta, k = env.k;
  if (opt.method == ProbMethod::Quadrature) {
    const MYDensity d(b * b * env.sigma * env.sigma * t / 4.0, env.eta, opt.my);
    const double val = d.expect([&](double v) { return -std::expm1(-k * z * std::pow(v, 1.0 / b)); });
    MCEstimate e = deterministic(val, "density_quadrature");
    e.seed = opt.seed;
    return e;
  }
  std::vector<double> x(opt.n_mc);
  parallel_for(opt.n_mc, opt.workers, [&](std::size_t i) {
    x[i] = -std::expm1(-z * std::exp(log_flow_limit(env, t, opt, i)));
  });
  const MeanSE m = mean_se(x);
  return MCEstimate{m.mean, m.se, opt.n_mc, opt.seed, t / static_cast<double>(opt.steps), "mc_environment"};
}

double extinction_prob_exact_stable(double z, const EnvParams& env) {
  require(z >= 0.0, ErrorKind::Parameter, "z must be nonnegative");
  require(env.beta > 0.0 && env.beta <= 1.0, ErrorKind::Parameter, "needs beta in (0,1]");
  if (env.m <= 0.0 || z == 0.0) return 1.0;
  const double b = env.beta, zk = z * env.k;
  return gamma_expectation(-env.eta, [&](double x) { return std::exp(-zk * std::pow(x, 1.0 / b)); }, 1e-13).value;
}

ExtinctionBounds extinction_bounds(double z, double sigma, double m, double gamma2, std::optional<double> kappa) {
  require(m > 0.0, ErrorKind::Regime, "extinction bounds need m > 0");
  require(gamma2 > 0.0 && sigma > 0.0, ErrorKind::Parameter, "bounds need gamma > 0 and sigma > 0");
  require(z >= 0.0, ErrorKind::Parameter, "z must be nonnegative");
  const double s2 = sigma * sigma, ex = -2.0 * m / s2;
  ExtinctionBounds b;
  b.lower = std::pow(1.0 + z * s2 / gamma2, ex);
  b.remark_lower = std::pow(1.0 + z * s2 / (2.0 * gamma2), ex);
  if (kappa && std::isfinite(*kappa)) b.remark_upper = std::pow(1.0 + 0.5 * z * s2 / (gamma2 + *kappa), ex);
  return b;
}

double AsymptoticConstant::scale(double t) const {
  switch (rate) {
    case RateKind::None: return 1.0;
    case RateKind::SqrtT: return std::sqrt(t);
    case RateKind::T32Exp: return std::pow(t, 1.5) * std::exp(rate_param * t);
    case RateKind::Exp: return std::exp(rate_param * t) * (sqrt_t ? std::sqrt(t) : 1.0);
  }
  return 1.0;
}

std::string AsymptoticConstant::rate_string() const {
  char buf[96];
  switch (rate) {
    case RateKind::None: return "none";
    case RateKind::SqrtT: return "t^{1/2}";
    case RateKind::T32Exp: std::snprintf(buf, sizeof buf, "t^{3/2}e^{%.17g t}", rate_param); return buf;
    case RateKind::Exp:
      std::snprintf(buf, sizeof buf, "%se^{%.17g t}", sqrt_t ? "t^{1/2}" : "", rate_param);
      return buf;
  }
  return "none";
}

namespace {

// log S(a) for S(a) = int u^p e^{-u} (1 + u/a)^{-q} du, tabulated once per eta on a log-a grid.
// Below a = 1 the table holds log of a^{-(p+1)} S(a), which is smooth and bounded as a -> 0.
class InnerTable {
 public:
  static constexpr double kLo = -60.0, kHi = 34.0, kStep = 0.05;

  explicit InnerTable(double eta) : p_(0.5 * (eta - 1.0)), q_(0.5 * (eta + 2.0)) {
    const auto n_lo = static_cast<std::size_t>(std::lround(-kLo / kStep)) + 1;
    const auto n_hi = static_cast<std::size_t>(std::lround(kHi / kStep)) + 1;
    std::vector<double> lo(n_lo), hi(n_hi);
    for (std::size_t i = 0; i < n_lo; ++i) {
      const double a = std::exp(kLo + kStep * static_cast<double>(i));
      lo[i] = std::log(integrate_half_line(
          [&](double w) { return w == 0.0 ? 0.0 : std::exp(p_ * std::log(w) - a * w - q_ * std::log1p(w)); }, 0.0,
          1e-12));
    }
    for (std::size_t i = 0; i < n_hi; ++i) {
      const double a = std::exp(kStep * static_cast<double>(i));
      hi[i] = std::log(integrate_half_line(
          [&](double u) { return u == 0.0 ? 0.0 : std::exp(p_ * std::log(u) - u - q_ * std::log1p(u / a)); }, 0.0,
          1e-12));
    }
    lo_ = Spline(lo.begin(), lo.end(), kLo, kStep);
    hi_ = Spline(hi.begin(), hi.end(), 0.0, kStep);
    g_inf_ = std::tgamma(p_ + 1.0);
  }

  double S(double a) const {
    const double x = std::log(a);
    if (x >= kHi) return g_inf_ * (1.0 - q_ * (p_ + 1.0) / a);
    if (x >= 0.0) return std::exp(hi_(x));
    return std::exp((p_ + 1.0) * x + lo_(std::max(x, kLo)));
  }

 private:
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  double p_, q_, g_inf_ = 1.0;
  Spline lo_, hi_;
};

const InnerTable& inner_table(double eta) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<InnerTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[eta];
  if (!slot) slot = std::make_unique<InnerTable>(eta);
  return *slot;
}

}  // namespace

double phi_eta(double v, double eta) {
  require(v > 0.0 && std::isfinite(v), ErrorKind::Parameter, "phi_eta needs v > 0");
  require(eta > 0.0, ErrorKind::Domain, "phi_eta needs eta > 0");
  const InnerTable& tab = inner_table(eta);
  auto outer = [&](double xi) {
    if (xi == 0.0) return 0.0;
    const double e2 = std::exp(-2.0 * xi);
    const double lc = xi + std::log1p(e2) - std::log(2.0);
    const double ls = xi < 1e-3 ? std::log(std::sinh(xi)) : xi + std::log1p(-e2) - std::log(2.0);
    return xi * std::exp(ls - (eta + 1.0) * lc) * tab.S(v * std::exp(2.0 * lc));
  };
  double err = 0.0;
  const double o = integrate_half_line(outer, 0.0, 1e-10, &err);
  require(std::isfinite(o) && o > 0.0, ErrorKind::Solver, "phi_eta quadrature did not converge");
  return std::tgamma(0.5 * (eta + 2.0)) / (std::sqrt(2.0) * kPi) * std::exp(-v) * std::pow(v, -eta - 1.0) * o;
}

PhiTable::PhiTable(double eta, double s_lo, double s_hi, double step) : eta_(eta), step_(step) {
  require(s_hi > s_lo && step > 0.0, ErrorKind::Parameter, "invalid phi grid");
  const std::size_t n = static_cast<std::size_t>(std::ceil((s_hi - s_lo) / step)) + 1;
  s_.resize(n);
  phi_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s_[i] = s_lo + step * static_cast<double>(i);
    phi_[i] = phi_eta(std::exp(s_[i]), eta);
  }
}

double PhiTable::integrate(const std::function<double(double)>& g) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < s_.size(); ++i) {
    const double v = std::exp(s_[i]);
    const double w = (i == 0 || i + 1 == s_.size()) ? 0.5 : 1.0;
    sum += w * g(v) * phi_[i] * v;
  }
  return sum * step_;
}

double critical_integral(double q, double beta) {
  return integrate_half_line(
      [&](double x) { return x == 0.0 ? 0.0 : -std::expm1(-q * std::pow(x, 1.0 / beta)) * std::exp(-x) / x; }, 0.0,
      1e-12);
}

namespace {

// Lower log-v cut for integrals of (1 - e^{-c v^{1/beta}}) phi_eta(v) ~ v^{1/beta - eta/2} near 0.
double phi_lower_cut(double eta, double beta) {
  const double d = std::max(0.05, 1.0 / beta - 0.5 * eta);
  return std::clamp(-40.0 / d, -400.0, -40.0);
}

}  // namespace

AsymptoticConstant asympt_survival_constant(double z, const EnvParams& env) {
  require(env.beta > 0.0 && env.beta <= 1.0, ErrorKind::Parameter, "survival asymptotics need beta in (0,1]");
  require(z > 0.0, ErrorKind::Parameter, "z must be positive");
  const Regime reg = classify_regime(env);
  const double b = env.beta, s = env.sigma, k = env.k;
  AsymptoticConstant a;
  a.regime = to_string(reg.survival);
  switch (reg.survival) {
    case SurvivalRegime::Supercritical:
      a.constant = 1.0 - extinction_prob_exact_stable(z, env);
      a.method = "gamma-expectation";
      break;
    case SurvivalRegime::Critical:
      a.rate = RateKind::SqrtT;
      a.constant = std::sqrt(2.0) / (std::sqrt(kPi) * b * s) * critical_integral(z * k, b);
      a.method = "quadrature";
      break;
    case SurvivalRegime::WeaklySubcritical: {
      a.rate = RateKind::T32Exp;
      a.rate_param = env.m * env.m / (2.0 * s * s);
      const PhiTable tab(env.eta, phi_lower_cut(env.eta, b));
      a.constant = 8.0 / (b * b * b * s * s * s) *
                   tab.integrate([&](double v) { return -std::expm1(-k * z * std::pow(v, 1.0 / b)); });
      a.method = "quadrature";
      break;
    }
    case SurvivalRegime::IntermediatelySubcritical:
      a.rate = RateKind::Exp;
      a.sqrt_t = true;
      a.rate_param = 0.5 * s * s;
      a.constant = z * std::sqrt(2.0) * k * std::tgamma(1.0 / b) / (std::sqrt(kPi) * b * s);
      a.method = "closed";
      break;
    case SurvivalRegime::StronglySubcritical:
      a.rate = RateKind::Exp;
      a.rate_param = -(2.0 * env.m + s * s) / 2.0;
      a.constant = z * k * std::exp(std::lgamma(env.eta - 1.0 / b) - std::lgamma(env.eta - 2.0 / b));
      a.method = "closed";
      break;
  }
  return a;
}

AsymptoticConstant asympt_explosion_constant(double z, const EnvParams& env) {
  require(env.beta > -1.0 && env.beta < 0.0, ErrorKind::Parameter, "explosion asymptotics need beta in (-1,0)");
  require(z > 0.0, ErrorKind::Parameter, "z must be positive");
  const Regime reg = classify_regime(env);
  require(reg.explosion.has_value(), ErrorKind::Regime, "no explosion regime for these parameters");
  const double b = env.beta, s = env.sigma, zk = z * env.k;
  AsymptoticConstant a;
  a.regime = to_string(*reg.explosion);
  switch (*reg.explosion) {
    case ExplosionRegime::SubcriticalExplosion:
      a.constant = gamma_expectation(-env.eta, [&](double x) { return std::exp(-zk * std::pow(x, 1.0 / b)); }, 1e-13).value;
      a.method = "gamma-expectation";
      break;
    case ExplosionRegime::CriticalExplosion: {
      a.rate = RateKind::SqrtT;
      const double I = integrate_half_line(
          [&](double x) { return x == 0.0 ? 0.0 : std::exp(-zk * std::pow(x, 1.0 / b) - x) / x; }, 0.0, 1e-12);
      a.constant = -std::sqrt(2.0) / (std::sqrt(kPi) * b * s) * I;
      a.method = "quadrature";
      break;
    }
    case ExplosionRegime::SupercriticalExplosion: {
      a.rate = RateKind::T32Exp;
      a.rate_param = env.m * env.m / (2.0 * s * s);
      // g(z^beta v) vanishes faster than any power as v -> 0, so a fixed cut suffices.
      const PhiTable tab(env.eta, -60.0);
      a.constant = -8.0 / (b * b * b * s * s * s) * tab.integrate([&](double v) { return std::exp(-zk * std::pow(v, 1.0 / b)); });
      a.method = "quadrature";
      break;
    }
  }
  return a;
}

NeveuReport neveu_longterm(double z, double sigma) {
  require(z >= 0.0 && sigma >= 0.0, ErrorKind::Parameter, "z and sigma must be nonnegative");
  NeveuReport r;
  if (z == 0.0) return r;
  if (sigma == 0.0) {
    r.p_w0 = std::exp(-z);
    return r;
  }
  const double mu = -0.5 * sigma * sigma, sd = sigma / std::sqrt(2.0);
  auto f = [&](double g) {
    const double x = (g - mu) / sd;
    return std::exp(-z * std::exp(g)) * std::exp(-0.5 * x * x) / (sd * std::sqrt(2.0 * kPi));
  };
  r.p_w0 = integrate_gk(f, mu - 14.0 * sd, mu + 14.0 * sd, 1e-13);
  return r;
}

MCEstimate neveu_w0_mc(double z, double sigma, std::size_t n, std::uint64_t seed) {
  require(n >= 2, ErrorKind::Parameter, "need at least two draws");
  Rng rng(seed, 0, Stream::Auxiliary);
  const double mu = -0.5 * sigma * sigma, sd = sigma / std::sqrt(2.0);
  std::vector<double> x(n);
  for (auto& xi : x) xi = std::exp(-z * std::exp(mu + sd * rng.normal()));
  const MeanSE m = mean_se(x);
  return MCEstimate{m.mean, m.se, n, seed, 0.0, "mc_gaussian"};
}

}  // namespace cbbre
