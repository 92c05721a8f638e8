#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cbbre/environment.hpp"
#include "cbbre/mechanism.hpp"
#include "cbbre/stats.hpp"

namespace cbbre {

enum class ProbMethod { MonteCarlo, Quadrature };

struct ProbOptions {
  ProbMethod method = ProbMethod::Quadrature;
  std::size_t n_mc = 10000;
  std::uint64_t seed = 0;
  std::size_t steps = 1000;  // environment grid per path
  ExpRule rule = ExpRule::BridgeCorrected;
  int workers = 1;
  MYOptions my;
};

/// P_z(Z_t > 0) for a Feller or stable (beta in (0,1]) mechanism.
MCEstimate survival_prob(double z, double t, const EnvParams& env, const ProbOptions& opt);

/// P_z(Z_t = infinity) for a stable mechanism with beta in (-1,0).
MCEstimate explosion_prob(double z, double t, const EnvParams& env, const ProbOptions& opt);

/// E[exp{-z k Gamma_{-eta}^{1/beta}}] for m > 0, else 1.
double extinction_prob_exact_stable(double z, const EnvParams& env);

struct ExtinctionBounds {
  double lower = 1.0;         // (1 + z sigma^2/gamma^2)^{-2m/sigma^2}
  double remark_lower = 1.0;  // (1 + z sigma^2/(2 gamma^2))^{-2m/sigma^2}
  std::optional<double> remark_upper;  // (1 + z sigma^2/(2(gamma^2 + kappa)))^{-2m/sigma^2}
};

/// kappa = int_1^inf x^2 mu(dx); absent when infinite.
ExtinctionBounds extinction_bounds(double z, double sigma, double m, double gamma2, std::optional<double> kappa);

enum class RateKind {
  None,           // the probability itself converges
  SqrtT,          // sqrt(t) P
  T32Exp,         // t^{3/2} e^{rate t} P
  Exp             // e^{rate t} P (for the junction case also times sqrt(t))
};

struct AsymptoticConstant {
  std::string regime;
  RateKind rate = RateKind::None;
  double rate_param = 0.0;
  bool sqrt_t = false;  // extra sqrt(t) factor with RateKind::Exp
  double constant = 0.0;
  std::string method;

  /// Multiplier that turns the finite-t probability into the converging quantity.
  double scale(double t) const;
  std::string rate_string() const;
};

/// phi_eta(v) by nested adaptive quadrature (outer xi, inner u).
double phi_eta(double v, double eta);

/// phi_eta tabulated on a log-v grid; integrals against it use the trapezoid rule in log v.
class PhiTable {
 public:
  /// Grid on log v in [s_lo, s_hi]; s_lo should sit where the caller's integrand is negligible.
  PhiTable(double eta, double s_lo, double s_hi = 4.1, double step = 0.1);
  double eta() const { return eta_; }
  /// int_0^inf g(v) phi_eta(v) dv
  double integrate(const std::function<double(double)>& g) const;

 private:
  double eta_, step_;
  std::vector<double> s_, phi_;
};

AsymptoticConstant asympt_survival_constant(double z, const EnvParams& env);
AsymptoticConstant asympt_explosion_constant(double z, const EnvParams& env);

/// int_0^inf (1 - e^{-q x^{1/beta}}) e^{-x} / x dx
double critical_integral(double q, double beta);

struct NeveuReport {
  double p_w0 = 1.0;  // P_z(lim Z_t e^{-K_t} = 0)
  bool infinite_mean = true;
  bool conservative = true;
};

NeveuReport neveu_longterm(double z, double sigma);

/// MC of E[exp{-z e^G}] over Gaussian draws G ~ N(-sigma^2/2, sigma^2/2).
MCEstimate neveu_w0_mc(double z, double sigma, std::size_t n, std::uint64_t seed);

}  // namespace cbbre
