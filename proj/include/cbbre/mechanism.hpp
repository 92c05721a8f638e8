#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace cbbre {

/// psi(u) = u log u. Carries the infinite-mean flag.
struct Neveu {};

/// psi(u) = -alpha u + gamma2 u^2.
struct Feller {
  double alpha = 0.0;
  double gamma2 = 1.0;
};

/// psi(u) = -alpha u + c u^{1+beta}, beta in (-1,0) U (0,1], sign(c) = sign(beta).
struct Stable {
  double alpha = 0.0;
  double beta = 0.5;
  double c = 1.0;
};

/// Jump measure given by a density on a grid (linear interpolation between nodes)
/// plus an atom of mass `tail_mass` at `tail_point` standing for the mass beyond the grid.
struct JumpTable {
  std::vector<double> x;
  std::vector<double> density;
  double tail_mass = 0.0;
  double tail_point = 0.0;
};

/// psi(u) = -q - a u + gamma2 u^2 + int (e^{-ux} - 1 + ux 1{x<1}) mu(dx).
struct GeneralCB {
  double q = 0.0;
  double a = 0.0;
  double gamma2 = 0.0;
  JumpTable mu;
};

using Mechanism = std::variant<Neveu, Feller, Stable, GeneralCB>;

/// Drift of the Neveu mechanism written in Levy-Khintchine form: u log u = -a u + int(...) x^{-2} dx.
double neveu_drift();

void validate(const Mechanism& mech);
std::string kind_name(const Mechanism& mech);

/// True when psi'(0+) = -infinity (Neveu, stable with beta < 0).
bool infinite_mean(const Mechanism& mech);

/// Total drift of the SDE (alpha for Feller/stable, a for GeneralCB).
double sde_drift(const Mechanism& mech);

/// psi'(0+); throws Unsupported for infinite-mean mechanisms.
double psi_prime0(const Mechanism& mech);

double eval_psi(const Mechanism& mech, double u);
double eval_psi0(const Mechanism& mech, double u);
double eval_capital_phi(const Mechanism& mech, double u);

/// Largest root of psi on [0, inf), when psi has one.
std::optional<double> psi_largest_root(const Mechanism& mech);

/// Int_{[lo,hi)} x^p mu(dx) for the tabulated part plus the tail atom.
double jump_moment(const JumpTable& mu, double p, double lo, double hi);

/// nu(dx) = kappa beta / Gamma(1-beta) x^{-1-beta} dx, so that int (1-e^{-ux}) nu(dx) = kappa u^beta.
struct StableImmigration {
  double beta = 0.5;
  double kappa = 1.0;
};

/// phi(u) = d u + int (1 - e^{-ux}) nu(dx); nu is stable, tabulated, or absent.
struct ImmigrationMechanism {
  double d = 0.0;
  std::optional<StableImmigration> stable;
  std::optional<JumpTable> table;

  bool none() const { return d == 0.0 && !stable && !table; }
};

void validate(const ImmigrationMechanism& imm);
double eval_phi(const ImmigrationMechanism& imm, double u);

struct EnvParams {
  double sigma = 1.0;
  double alpha = 0.0;
  double beta = 1.0;
  double c = 1.0;
  double m = 0.0;    // criticality parameter
  double eta = 0.0;  // -2m / (beta sigma^2)
  double k = 0.0;    // (beta sigma^2 / (2c))^{1/beta}
};

EnvParams derive_env(double sigma, double alpha, double beta, double c);

/// Environment parameters for a Feller or stable mechanism.
EnvParams derive_env(const Mechanism& mech, double sigma);

/// m for any finite-mean mechanism: -psi'(0+) - sigma^2/2.
double criticality(const Mechanism& mech, double sigma);

enum class SurvivalRegime { Supercritical, Critical, WeaklySubcritical, IntermediatelySubcritical, StronglySubcritical };
enum class ExplosionRegime { SubcriticalExplosion, CriticalExplosion, SupercriticalExplosion };
enum class ConditionedRegime { WeaklySuper, IntermediatelySuper, StronglySuper };

struct Regime {
  SurvivalRegime survival;
  std::optional<ExplosionRegime> explosion;
  std::optional<ConditionedRegime> conditioned;
};

Regime classify_regime(const EnvParams& env, double eps_regime = 1e-12);

const char* to_string(SurvivalRegime r);
const char* to_string(ExplosionRegime r);
const char* to_string(ConditionedRegime r);

}  // namespace cbbre
