#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cbbre/longterm.hpp"
#include "cbbre/mechanism.hpp"
#include "cbbre/simulator.hpp"

namespace cbbre {

/// theta for m <= 0: 0 | m^2/(2 sigma^2) | -(2m + sigma^2)/2.
double theta(const EnvParams& env);

/// U for m <= 0. The weakly subcritical branch tabulates phi_eta on construction; reuse the object.
class UFunction {
 public:
  explicit UFunction(const EnvParams& env);
  double operator()(double z) const;
  const EnvParams& env() const { return env_; }
  SurvivalRegime regime() const { return regime_; }

 private:
  EnvParams env_;
  SurvivalRegime regime_;
  std::shared_ptr<const PhiTable> phi_;
};

/// One-shot U(z); builds a UFunction.
double U(double z, const EnvParams& env);

/// U_*(z) = E[exp{-z k Gamma_{-eta}^{1/beta}}] for m > 0.
double U_star(double z, const EnvParams& env);

enum class HKind { Qprocess, EventualExtinction };

const char* to_string(HKind k);

/// Doob h-transform weight: D_t = e^{theta t} U(Z_t) (Q-process) or U_*(Z_t) (eventual extinction).
struct HTransform {
  HKind kind;
  EnvParams env;
  double theta = 0.0;  // zero for eventual extinction
  std::shared_ptr<const UFunction> u;  // Q-process only

  static HTransform qprocess(const EnvParams& env);
  static HTransform eventual_extinction(const EnvParams& env);

  double h(double z) const;
  double weight(double t, double z) const { return (kind == HKind::Qprocess ? std::exp(theta * t) : 1.0) * h(z); }
};

/// D at each requested time; times must match the snapshot times the path was recorded with.
std::vector<double> qprocess_weight(const SimPath& path, const std::vector<double>& times, const HTransform& ht);

/// h(x, y) = exp{-k x^{1/beta}} - exp{-k (x+y)^{1/beta}}.
double h_fun(double x, double y, double k, double beta);

struct HBounds {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
};

/// The mean-value bounds around h(x, y) for a given eps > 0.
HBounds h_bounds(double x, double y, double eps, double k, double beta);

/// P*_z(Z_t > 0) for m > 0. MonteCarlo: environment draws of I^{(-eta)} with the Gamma
/// expectation done by quadrature. Quadrature: the same expectation against the density of 1/(2 I^{(-eta)}).
MCEstimate conditioned_survival(double z, double t, const EnvParams& env, const ProbOptions& opt);

/// Limits of rate(t) P*_z(Z_t > 0) in the three supercritical regimes.
AsymptoticConstant asympt_conditioned_constant(double z, const EnvParams& env);

struct CbibreSetup {
  Mechanism mech;
  ImmigrationMechanism imm;
  double sigma = 1.0;
};

/// Q-process of a Feller/stable CBBRE with m <= -sigma^2 as a CBIBRE:
/// alpha -> alpha + sigma^2, phi(u) = c (beta+1) u^beta (drift 2c for beta = 1).
CbibreSetup qprocess_as_cbibre(const EnvParams& env);

}  // namespace cbbre
