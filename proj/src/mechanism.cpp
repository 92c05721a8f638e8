#include "cbbre/mechanism.hpp"

#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>

#include "cbbre/error.hpp"

namespace cbbre {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Unsupported: return "unsupported mechanism";
    case ErrorKind::Instability: return "instability";
    case ErrorKind::Method: return "method error";
    case ErrorKind::Solver: return "solver failure";
    case ErrorKind::Regime: return "regime mismatch";
    case ErrorKind::Schema: return "schema error";
  }
  return "error";
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// e^{-y} - 1 + y without cancellation for small y.
double levy_kernel_comp(double y) {
  if (std::abs(y) < 1e-3) return y * y * (0.5 - y / 6.0 + y * y / 24.0);
  return std::expm1(-y) + y;
}

constexpr double kGL4x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double kGL4w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

// Integrates g(x) * density(x) over the tabulated grid, splitting intervals at `split`.
template <class G>
double integrate_table(const JumpTable& mu, G&& g, double split) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < mu.x.size(); ++i) {
    const double x0 = mu.x[i], x1 = mu.x[i + 1];
    const double d0 = mu.density[i], d1 = mu.density[i + 1];
    auto piece = [&](double a, double b) {
      const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
      double s = 0.0;
      for (int j = 0; j < 4; ++j) {
        const double x = mid + h * kGL4x[j];
        const double d = d0 + (d1 - d0) * (x - x0) / (x1 - x0);
        s += kGL4w[j] * g(x) * d;
      }
      return s * h;
    };
    if (split > x0 && split < x1) {
      total += piece(x0, split) + piece(split, x1);
    } else {
      total += piece(x0, x1);
    }
  }
  return total;
}

double table_levy_integral(const JumpTable& mu, double u) {
  auto g = [u](double x) { return x < 1.0 ? levy_kernel_comp(u * x) : std::expm1(-u * x); };
  double s = integrate_table(mu, g, 1.0);
  if (mu.tail_mass > 0.0) s += mu.tail_mass * g(mu.tail_point);
  return s;
}

}  // namespace

double neveu_drift() { return boost::math::constants::euler<double>() - 1.0; }

double jump_moment(const JumpTable& mu, double p, double lo, double hi) {
  auto g = [&](double x) { return (x >= lo && x < hi) ? std::pow(x, p) : 0.0; };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < mu.x.size(); ++i) {
    // Split at the window edges so the indicator does not degrade the rule.
    const double a = std::max(mu.x[i], lo), b = std::min(mu.x[i + 1], hi);
    if (b <= a) continue;
    JumpTable piece;
    piece.x = {a, b};
    const auto interp = [&](double x) {
      return mu.density[i] + (mu.density[i + 1] - mu.density[i]) * (x - mu.x[i]) / (mu.x[i + 1] - mu.x[i]);
    };
    piece.density = {interp(a), interp(b)};
    s += integrate_table(piece, [&](double x) { return std::pow(x, p); }, -1.0);
  }
  if (mu.tail_mass > 0.0) s += mu.tail_mass * g(mu.tail_point);
  return s;
}

void validate(const ImmigrationMechanism& imm) {
  require(imm.d >= 0.0 && std::isfinite(imm.d), ErrorKind::Parameter, "immigration drift must be nonnegative");
  if (imm.stable) {
    require(imm.stable->beta > 0.0 && imm.stable->beta < 1.0, ErrorKind::Parameter,
            "stable immigration index must lie in (0,1)");
    require(imm.stable->kappa >= 0.0, ErrorKind::Parameter, "kappa must be nonnegative");
  }
  if (imm.table) {
    const auto& t = *imm.table;
    require(t.x.size() == t.density.size(), ErrorKind::Parameter, "immigration table size mismatch");
    for (std::size_t i = 0; i < t.x.size(); ++i) {
      require(t.x[i] > 0.0 && t.density[i] >= 0.0, ErrorKind::Parameter, "immigration table must be positive");
      if (i > 0) require(t.x[i] > t.x[i - 1], ErrorKind::Parameter, "immigration grid must increase");
    }
    require(t.tail_mass >= 0.0, ErrorKind::Parameter, "tail mass must be nonnegative");
  }
}

double eval_phi(const ImmigrationMechanism& imm, double u) {
  require(u >= 0.0, ErrorKind::Domain, "phi needs u >= 0");
  double s = imm.d * u;
  if (imm.stable && u > 0.0) s += imm.stable->kappa * std::pow(u, imm.stable->beta);
  if (imm.table) {
    auto g = [u](double x) { return -std::expm1(-u * x); };
    s += integrate_table(*imm.table, g, -1.0);
    if (imm.table->tail_mass > 0.0) s += imm.table->tail_mass * g(imm.table->tail_point);
  }
  return s;
}

void validate(const Mechanism& mech) {
  std::visit(overloaded{
                 [](const Neveu&) {},
                 [](const Feller& f) {
                   require(f.gamma2 >= 0.0 && std::isfinite(f.alpha), ErrorKind::Parameter, "Feller needs gamma2 >= 0");
                 },
                 [](const Stable& s) {
                   require(s.beta > -1.0 && s.beta <= 1.0 && s.beta != 0.0, ErrorKind::Parameter,
                           "stable index must lie in (-1,0) U (0,1]");
                   require(s.c != 0.0 && (s.c > 0.0) == (s.beta > 0.0), ErrorKind::Parameter,
                           "stable scale c must share the sign of beta");
                 },
                 [](const GeneralCB& g) {
                   require(g.q >= 0.0 && g.gamma2 >= 0.0, ErrorKind::Parameter, "GeneralCB needs q >= 0, gamma2 >= 0");
                   require(g.mu.x.size() == g.mu.density.size(), ErrorKind::Parameter, "jump table size mismatch");
                   for (std::size_t i = 0; i < g.mu.x.size(); ++i) {
                     require(g.mu.x[i] > 0.0 && g.mu.density[i] >= 0.0, ErrorKind::Parameter,
                             "jump table needs x > 0 and density >= 0");
                     if (i > 0) require(g.mu.x[i] > g.mu.x[i - 1], ErrorKind::Parameter, "jump grid not increasing");
                   }
                   require(g.mu.tail_mass >= 0.0, ErrorKind::Parameter, "tail mass must be nonnegative");
                   require(g.mu.tail_mass == 0.0 || g.mu.tail_point > 0.0, ErrorKind::Parameter,
                           "tail atom needs a positive location");
                 }},
             mech);
}

std::string kind_name(const Mechanism& mech) {
  return std::visit(overloaded{[](const Neveu&) { return std::string("neveu"); },
                               [](const Feller&) { return std::string("feller"); },
                               [](const Stable&) { return std::string("stable"); },
                               [](const GeneralCB&) { return std::string("general"); }},
                    mech);
}

bool infinite_mean(const Mechanism& mech) {
  if (std::holds_alternative<Neveu>(mech)) return true;
  if (auto s = std::get_if<Stable>(&mech)) return s->beta < 0.0;
  return false;
}

double sde_drift(const Mechanism& mech) {
  return std::visit(overloaded{[](const Neveu&) { return neveu_drift(); },
                               [](const Feller& f) { return f.alpha; },
                               [](const Stable& s) { return s.alpha; },
                               [](const GeneralCB& g) { return g.a; }},
                    mech);
}

double psi_prime0(const Mechanism& mech) {
  require(!infinite_mean(mech), ErrorKind::Unsupported, "psi'(0+) = -infinity for this mechanism");
  return std::visit(overloaded{[](const Neveu&) { return -std::numeric_limits<double>::infinity(); },
                               [](const Feller& f) { return -f.alpha; },
                               [](const Stable& s) { return -s.alpha; },
                               [](const GeneralCB& g) {
                                 return -g.a - jump_moment(g.mu, 1.0, 1.0, std::numeric_limits<double>::infinity());
                               }},
                    mech);
}

double eval_psi(const Mechanism& mech, double u) {
  require(u >= 0.0, ErrorKind::Domain, "psi needs u >= 0");
  return std::visit(overloaded{[u](const Neveu&) { return u > 0.0 ? u * std::log(u) : 0.0; },
                               [u](const Feller& f) { return -f.alpha * u + f.gamma2 * u * u; },
                               [u](const Stable& s) { return -s.alpha * u + s.c * std::pow(u, 1.0 + s.beta); },
                               [u](const GeneralCB& g) {
                                 if (u == 0.0) return -g.q;
                                 return -g.q - g.a * u + g.gamma2 * u * u + table_levy_integral(g.mu, u);
                               }},
                    mech);
}

double eval_psi0(const Mechanism& mech, double u) {
  require(u >= 0.0, ErrorKind::Domain, "psi0 needs u >= 0");
  require(!infinite_mean(mech), ErrorKind::Unsupported, "psi0 needs |psi'(0+)| < infinity");
  return std::visit(overloaded{[](const Neveu&) { return 0.0; },
                               [u](const Feller& f) { return f.gamma2 * u * u; },
                               [u](const Stable& s) { return s.c * std::pow(u, 1.0 + s.beta); },
                               [u](const GeneralCB& g) {
                                 if (u == 0.0) return -g.q;
                                 auto full = [u](double x) { return levy_kernel_comp(u * x); };
                                 double s = integrate_table(g.mu, full, 1.0);
                                 if (g.mu.tail_mass > 0.0) s += g.mu.tail_mass * full(g.mu.tail_point);
                                 return -g.q + g.gamma2 * u * u + s;
                               }},
                    mech);
}

double eval_capital_phi(const Mechanism& mech, double u) {
  require(u >= 0.0, ErrorKind::Domain, "Phi needs u >= 0");
  if (u == 0.0) {
    const double q = std::holds_alternative<GeneralCB>(mech) ? std::get<GeneralCB>(mech).q : 0.0;
    require(q == 0.0, ErrorKind::Domain, "Phi(0+) = -infinity when q > 0");
    (void)eval_psi0(mech, 0.0);
    return 0.0;
  }
  return eval_psi0(mech, u) / u;
}

std::optional<double> psi_largest_root(const Mechanism& mech) {
  return std::visit(
      overloaded{[](const Neveu&) -> std::optional<double> { return 1.0; },
                 [](const Feller& f) -> std::optional<double> {
                   if (f.gamma2 == 0.0) return std::nullopt;
                   return std::max(0.0, f.alpha / f.gamma2);
                 },
                 [](const Stable& s) -> std::optional<double> {
                   const double r = s.alpha / s.c;
                   if (r <= 0.0) return 0.0;
                   return std::pow(r, 1.0 / s.beta);
                 },
                 [&mech](const GeneralCB& g) -> std::optional<double> {
                   // psi is convex; bracket the last sign change and bisect.
                   if (g.gamma2 == 0.0 && g.mu.x.empty() && g.mu.tail_mass == 0.0) return std::nullopt;
                   double hi = 1.0;
                   int guard = 0;
                   while (eval_psi(mech, hi) <= 0.0 && guard++ < 200) hi *= 2.0;
                   if (eval_psi(mech, hi) <= 0.0) return std::nullopt;
                   double lo = 0.0;
                   if (eval_psi(mech, hi * 1e-12) > 0.0 && g.q == 0.0) return 0.0;
                   lo = hi * 1e-12;
                   for (int i = 0; i < 200; ++i) {
                     const double mid = 0.5 * (lo + hi);
                     (eval_psi(mech, mid) > 0.0 ? hi : lo) = mid;
                   }
                   return 0.5 * (lo + hi);
                 }},
      mech);
}

EnvParams derive_env(double sigma, double alpha, double beta, double c) {
  require(sigma > 0.0, ErrorKind::Parameter, "sigma must be positive");
  require(beta != 0.0, ErrorKind::Parameter, "beta must be nonzero");
  require(c != 0.0 && (c > 0.0) == (beta > 0.0), ErrorKind::Parameter, "c must share the sign of beta");
  EnvParams e;
  e.sigma = sigma;
  e.alpha = alpha;
  e.beta = beta;
  e.c = c;
  e.m = alpha - 0.5 * sigma * sigma;
  e.eta = -2.0 * e.m / (beta * sigma * sigma);
  e.k = std::pow(beta * sigma * sigma / (2.0 * c), 1.0 / beta);
  return e;
}

EnvParams derive_env(const Mechanism& mech, double sigma) {
  if (auto f = std::get_if<Feller>(&mech)) return derive_env(sigma, f->alpha, 1.0, f->gamma2);
  if (auto s = std::get_if<Stable>(&mech)) return derive_env(sigma, s->alpha, s->beta, s->c);
  throw Error(ErrorKind::Unsupported, "environment parameters (eta, k) need a Feller or stable mechanism");
}

double criticality(const Mechanism& mech, double sigma) {
  return -psi_prime0(mech) - 0.5 * sigma * sigma;
}

Regime classify_regime(const EnvParams& env, double eps) {
  const double s2 = env.sigma * env.sigma;
  const double m = env.m;
  Regime r{};
  if (std::abs(m) <= eps) {
    r.survival = SurvivalRegime::Critical;
  } else if (m > 0.0) {
    r.survival = SurvivalRegime::Supercritical;
  } else if (std::abs(m + s2) <= eps) {
    r.survival = SurvivalRegime::IntermediatelySubcritical;
  } else if (m > -s2) {
    r.survival = SurvivalRegime::WeaklySubcritical;
  } else {
    r.survival = SurvivalRegime::StronglySubcritical;
  }
  if (env.beta < 0.0) {
    if (std::abs(m) <= eps) r.explosion = ExplosionRegime::CriticalExplosion;
    else r.explosion = m < 0.0 ? ExplosionRegime::SubcriticalExplosion : ExplosionRegime::SupercriticalExplosion;
  }
  if (m > eps && env.beta > 0.0) {
    const double edge = env.beta * s2;
    if (std::abs(m - edge) <= eps) r.conditioned = ConditionedRegime::IntermediatelySuper;
    else r.conditioned = m < edge ? ConditionedRegime::WeaklySuper : ConditionedRegime::StronglySuper;
  }
  return r;
}

const char* to_string(SurvivalRegime r) {
  switch (r) {
    case SurvivalRegime::Supercritical: return "supercritical";
    case SurvivalRegime::Critical: return "critical";
    case SurvivalRegime::WeaklySubcritical: return "weakly_subcritical";
    case SurvivalRegime::IntermediatelySubcritical: return "intermediately_subcritical";
    case SurvivalRegime::StronglySubcritical: return "strongly_subcritical";
  }
  return "";
}

const char* to_string(ExplosionRegime r) {
  switch (r) {
    case ExplosionRegime::SubcriticalExplosion: return "subcritical_explosion";
    case ExplosionRegime::CriticalExplosion: return "critical_explosion";
    case ExplosionRegime::SupercriticalExplosion: return "supercritical_explosion";
  }
  return "";
}

const char* to_string(ConditionedRegime r) {
  switch (r) {
    case ConditionedRegime::WeaklySuper: return "weakly_supercritical";
    case ConditionedRegime::IntermediatelySuper: return "intermediately_supercritical";
    case ConditionedRegime::StronglySuper: return "strongly_supercritical";
  }
  return "";
}

}  // namespace cbbre
