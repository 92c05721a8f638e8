#include "cbbre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cbbre/error.hpp"
#include "cbbre/parallel.hpp"
#include "cbbre/quadrature.hpp"

namespace cbbre {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// int_0^1 e^{xv} dv and int_0^1 v(1-v) e^{xv} dv for x <= 0.
double e1(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

double m1(double x) {
  if (std::fabs(x) < 1.0) {
    double term = 1.0, sum = 0.0;
    for (int n = 0; n < 18; ++n) {
      if (n > 0) term *= x / n;
      sum += term / ((n + 2.0) * (n + 3.0));
    }
    return sum;
  }
  return (x * (std::exp(x) + 1.0) - 2.0 * std::expm1(x)) / (x * x * x);
}

}  // namespace

const char* to_string(PathFlavor f) {
  switch (f) {
    case PathFlavor::K: return "K";
    case PathFlavor::K0: return "K0";
    case PathFlavor::Drifted: return "drifted";
  }
  return "?";
}

const char* to_string(ExpRule r) {
  switch (r) {
    case ExpRule::Trapezoid: return "trapezoid";
    case ExpRule::ExactLinear: return "exact_linear";
    case ExpRule::BridgeCorrected: return "bridge_corrected";
  }
  return "?";
}

double EnvPath::at(double s) const {
  if (s <= t.front()) return values.front();
  if (s >= t.back()) return values.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double w = (s - t[i]) / (t[i + 1] - t[i]);
  return values[i] + w * (values[i + 1] - values[i]);
}

EnvPath sample_env_path(double sigma, double drift, double T, std::size_t N, std::uint64_t seed, std::uint64_t path,
                        PathFlavor flavor) {
  require(sigma >= 0.0 && std::isfinite(sigma), ErrorKind::Parameter, "sigma must be finite and nonnegative");
  require(T > 0.0 && std::isfinite(T), ErrorKind::Parameter, "horizon must be positive");
  require(N >= 1, ErrorKind::Parameter, "need at least one step");
  EnvPath p;
  p.flavor = flavor;
  p.sigma = sigma;
  p.drift = drift;
  p.t.resize(N + 1);
  p.values.resize(N + 1);
  Rng rng(seed, path, Stream::Environment);
  const double h = T / static_cast<double>(N), sh = sigma * std::sqrt(h);
  p.t[0] = 0.0;
  p.values[0] = 0.0;
  for (std::size_t i = 1; i <= N; ++i) {
    p.t[i] = (i == N) ? T : h * static_cast<double>(i);
    p.values[i] = p.values[i - 1] + drift * h + sh * rng.normal();
  }
  return p;
}

EnvPath make_env_path(std::vector<double> t, std::vector<double> values, PathFlavor flavor, double sigma,
                      double drift) {
  require(t.size() >= 2 && t.size() == values.size(), ErrorKind::Parameter, "grid and values must match");
  require(t[0] == 0.0 && values[0] == 0.0, ErrorKind::Parameter, "path must start at (0,0)");
  for (std::size_t i = 1; i < t.size(); ++i)
    require(t[i] > t[i - 1], ErrorKind::Parameter, "grid must be strictly increasing");
  EnvPath p;
  p.t = std::move(t);
  p.values = std::move(values);
  p.flavor = flavor;
  p.sigma = sigma;
  p.drift = drift;
  p.adaptive = true;
  return p;
}

EnvPath refine_path(const EnvPath& path, std::uint64_t seed, std::uint64_t path_id) {
  Rng rng(seed, path_id, Stream::Auxiliary);
  EnvPath out = path;
  const std::size_t n = path.steps();
  out.t.assign(2 * n + 1, 0.0);
  out.values.assign(2 * n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = path.t[i + 1] - path.t[i];
    out.t[2 * i] = path.t[i];
    out.values[2 * i] = path.values[i];
    out.t[2 * i + 1] = path.t[i] + 0.5 * h;
    out.values[2 * i + 1] = 0.5 * (path.values[i] + path.values[i + 1]) + 0.5 * path.sigma * std::sqrt(h) * rng.normal();
  }
  out.t[2 * n] = path.t[n];
  out.values[2 * n] = path.values[n];
  return out;
}

std::string env_path_csv(const EnvPath& path) {
  std::ostringstream os;
  os << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < path.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", path.t[i], path.values[i]);
    os << buf;
  }
  return os.str();
}

double log_cell_integral(double la, double lb, double h, double q) {
  // Factor out the larger endpoint so the reduced slope is nonpositive.
  double base = la, x = lb - la;
  if (x > 0.0) {
    base = lb;
    x = -x;
  }
  const double inner = e1(x) + q * h * h * m1(x);
  return base + std::log(h) + std::log(inner);
}

ExpFunctional exp_functional(const EnvPath& path, double theta, ExpRule rule, double rho) {
  ExpFunctional out;
  out.rule = rule;
  out.T = path.horizon();
  double acc = kNegInf;
  const double s2 = theta * theta * path.sigma * path.sigma;
  for (std::size_t i = 0; i + 1 < path.t.size(); ++i) {
    const double h = path.t[i + 1] - path.t[i];
    const double la = theta * path.values[i] + rho * path.t[i];
    const double lb = theta * path.values[i + 1] + rho * path.t[i + 1];
    double cell;
    switch (rule) {
      case ExpRule::Trapezoid: cell = std::log(0.5 * h) + log_add(la, lb); break;
      case ExpRule::ExactLinear: cell = log_cell_integral(la, lb, h, 0.0); break;
      default: cell = log_cell_integral(la, lb, h, s2 / (2.0 * h)); break;
    }
    acc = log_add(acc, cell);
  }
  out.log_value = acc;
  out.saturated = acc > std::log(std::numeric_limits<double>::max());
  out.value = out.saturated ? std::numeric_limits<double>::infinity() : std::exp(acc);
  return out;
}

double sample_exp_functional(double eta, double t, std::size_t N, Rng& rng, ExpRule rule) {
  const double h = t / static_cast<double>(N), sh = std::sqrt(h);
  const double q = 2.0 / h;  // theta = 2, unit volatility
  double x = 0.0, acc = kNegInf;
  for (std::size_t i = 0; i < N; ++i) {
    const double xn = x + eta * h + sh * rng.normal();
    double cell;
    switch (rule) {
      case ExpRule::Trapezoid: cell = std::log(0.5 * h) + log_add(2.0 * x, 2.0 * xn); break;
      case ExpRule::ExactLinear: cell = log_cell_integral(2.0 * x, 2.0 * xn, h, 0.0); break;
      default: cell = log_cell_integral(2.0 * x, 2.0 * xn, h, q); break;
    }
    acc = log_add(acc, cell);
    x = xn;
  }
  return std::exp(acc);
}

double dufresne_law(double eta) {
  require(eta < 0.0, ErrorKind::Domain, "the perpetual functional is finite only for eta < 0");
  return -eta;
}

namespace {

// Kernel core: int_0^inf e^{-y^2/2nu} sinh y sin(pi y/nu) (e^{-r cosh y} - e^{-r}) dy.
double theta_core(double r, double nu, double* l1_out) {
  const double er = std::exp(-r);
  auto f = [&](double y) {
    const double sh = std::sinh(0.5 * y);
    const double g = std::exp(-y * y / (2.0 * nu) + y) * 0.5 * (-std::expm1(-2.0 * y));
    return g * std::sin(kPi * y / nu) * er * std::expm1(-2.0 * r * sh * sh);
  };
  const double Y = nu + std::sqrt(80.0 * nu) + 2.0;
  const double w = 0.5 * nu;
  double sum = 0.0, l1 = 0.0;
  for (double a = 0.0; a < Y; a += w) {
    double err = 0.0, pl1 = 0.0;
    sum += integrate_gk(f, a, std::min(Y, a + w), 1e-13, &err, &pl1, 10);
    l1 += pl1;
  }
  if (l1_out) *l1_out = l1;
  return sum;
}

}  // namespace

double hw_kernel(double r, double t, double t_min) {
  require(r > 0.0 && std::isfinite(r), ErrorKind::Parameter, "r must be positive");
  require(t >= t_min, ErrorKind::Instability, "kernel cancellation too severe below t_min");
  const double th = theta_core(r, t, nullptr);
  return r / std::sqrt(2.0 * kPi * kPi * kPi * t) * std::exp(kPi * kPi / (2.0 * t)) * th;
}

MYDensity::MYDensity(double nu, double eta, MYOptions opt) : nu_(nu), eta_(eta), opt_(opt) {
  require(std::isfinite(nu) && std::isfinite(eta), ErrorKind::Parameter, "nu and eta must be finite");
  require(nu >= opt.nu_min, ErrorKind::Instability, "nu below nu_min: kernel cancellation too severe");
  const std::size_t ns = static_cast<std::size_t>(std::ceil((opt.log_r_max - opt.log_r_min) / opt.log_r_step)) + 1;
  s_.resize(ns);
  theta_.resize(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    s_[j] = opt.log_r_min + opt.log_r_step * static_cast<double>(j);
    double l1 = 0.0;
    const double th = theta_core(std::exp(s_[j]), nu, &l1);
    // Values swamped by cancellation are dropped; they only feed negligible v.
    theta_[j] = std::fabs(th) < 1e-10 * l1 ? 0.0 : th;
  }
  log_pref_ = std::log(2.0) - 0.5 * eta * eta * nu + kPi * kPi / (2.0 * nu) - 0.5 * std::log(2.0 * kPi * kPi * kPi * nu);

  const std::size_t nu_pts = static_cast<std::size_t>(std::ceil((opt.log_v_max - opt.log_v_min) / opt.log_v_step)) + 1;
  u_.resize(nu_pts);
  p_.resize(nu_pts);
  cum_.assign(nu_pts, 0.0);
  for (std::size_t i = 0; i < nu_pts; ++i) {
    u_[i] = opt.log_v_min + opt.log_v_step * static_cast<double>(i);
    p_[i] = pdf(std::exp(u_[i]));
  }
  for (std::size_t i = 1; i < nu_pts; ++i) {
    const double a = p_[i - 1] * std::exp(u_[i - 1]), b = p_[i] * std::exp(u_[i]);
    cum_[i] = cum_[i - 1] + 0.5 * opt.log_v_step * (a + b);
  }
}

double MYDensity::log_pdf(double v) const {
  if (!(v > 0.0) || !std::isfinite(v)) return kNegInf;
  const double inv4v = 1.0 / (4.0 * v);
  // Terms are exp((eta+1) s - r^2/(4v)) * Theta; scale by the largest exponent.
  double best = kNegInf;
  for (std::size_t j = 0; j < s_.size(); ++j) {
    if (theta_[j] == 0.0) continue;
    const double r = std::exp(s_[j]);
    const double e = (eta_ + 1.0) * s_[j] - r * r * inv4v + std::log(std::fabs(theta_[j]));
    best = std::max(best, e);
  }
  if (best == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::size_t j = 0; j < s_.size(); ++j) {
    if (theta_[j] == 0.0) continue;
    const double r = std::exp(s_[j]);
    const double e = (eta_ + 1.0) * s_[j] - r * r * inv4v - best;
    if (e < -745.0) continue;
    sum += std::exp(e) * theta_[j];
  }
  if (!(sum > 0.0)) return kNegInf;
  return log_pref_ - v - (eta_ + 1.0) * std::log(2.0 * v) + best + std::log(sum * opt_.log_r_step);
}

double MYDensity::pdf(double v) const {
  const double lp = log_pdf(v);
  return lp == kNegInf ? 0.0 : std::exp(lp);
}

double MYDensity::cdf(double v) const {
  if (!(v > 0.0)) return 0.0;
  const double u = std::log(v);
  if (u <= u_.front()) return 0.0;
  if (u >= u_.back()) return cum_.back();
  const double pos = (u - u_.front()) / opt_.log_v_step;
  const std::size_t i = std::min(u_.size() - 2, static_cast<std::size_t>(pos));
  const double w = pos - static_cast<double>(i);
  return cum_[i] + w * (cum_[i + 1] - cum_[i]);
}

double MYDensity::expect(const std::function<double(double)>& g) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < u_.size(); ++i) {
    if (p_[i] == 0.0) continue;
    const double v = std::exp(u_[i]);
    const double w = (i == 0 || i + 1 == u_.size()) ? 0.5 : 1.0;
    sum += w * g(v) * p_[i] * v;
  }
  return sum * opt_.log_v_step;
}

Lemma1Report lemma1_moments(double eta, double p, double t, std::size_t n_mc, std::uint64_t seed, std::size_t steps,
                            int workers) {
  require(p >= 0.0 && t > 0.0 && n_mc >= 2 && steps >= 1, ErrorKind::Parameter, "invalid moment-identity arguments");
  std::vector<double> a(n_mc), a2(n_mc), b(n_mc), c(n_mc), d(n_mc);
  const std::size_t half = std::max<std::size_t>(1, steps / 2);
  parallel_for(n_mc, workers, [&](std::size_t i) {
    Rng rng(seed, i, Stream::Auxiliary);
    const double I = sample_exp_functional(eta, t, steps, rng);
    a[i] = std::pow(I, -p);
    a2[i] = std::pow(I, -2.0 * p);
    b[i] = std::pow(sample_exp_functional(2.0 * p - eta, t, steps, rng), -p);
    c[i] = std::pow(sample_exp_functional(2.0 * p - eta, 0.5 * t, half, rng), -p);
    d[i] = std::pow(sample_exp_functional(eta - 2.0 * p, 0.5 * t, half, rng), -p);
  });
  const double fac = std::exp((2.0 * p * p - 2.0 * p * eta) * t);
  const MeanSE ma = mean_se(a), ma2 = mean_se(a2), mb = mean_se(b), mc = mean_se(c), md = mean_se(d);
  const double dt = t / static_cast<double>(steps);
  auto est = [&](double v, double se, const char* m) { return MCEstimate{v, se, n_mc, seed, dt, m}; };
  Lemma1Report rep;
  rep.lhs = est(ma.mean, ma.se, "mc_bridge");
  rep.rhs = est(fac * mb.mean, fac * mb.se, "mc_bridge");
  rep.ineq_lhs = est(ma2.mean, ma2.se, "mc_bridge");
  const double prod = mc.mean * md.mean;
  const double prod_se = std::sqrt(md.mean * md.mean * mc.se * mc.se + mc.mean * mc.mean * md.se * md.se);
  rep.inequality_rhs = est(fac * prod, fac * prod_se, "mc_bridge");
  rep.identity_ok = std::fabs(rep.lhs.value - rep.rhs.value) <= 3.0 * std::hypot(rep.lhs.se, rep.rhs.se);
  rep.inequality_ok = rep.ineq_lhs.value <= rep.inequality_rhs.value + 3.0 * std::hypot(rep.ineq_lhs.se, rep.inequality_rhs.se);
  return rep;
}

}  // namespace cbbre
