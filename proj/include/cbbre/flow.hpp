#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cbbre/environment.hpp"
#include "cbbre/mechanism.hpp"

namespace cbbre {

inline constexpr double kLambdaInfinity = std::numeric_limits<double>::infinity();

struct FlowOptions {
  double tol = 1e-10;        // step-halving tolerance, relative to max(1, |v|)
  double tol_floor = 1e-14;  // |v| below this is set to 0
  double neg_tol = 1e-9;     // negative excursions beyond this are solver failures
  int max_halvings = 12;
  double blowup_level = 1e300;
};

/// v_t(s, lambda, delta) on the environment grid restricted to [0, t]; v(t) = lambda.
struct FlowSolution {
  double t = 0.0;
  double lambda = 0.0;
  std::vector<double> s;
  std::vector<double> v;
  std::optional<double> blowup_time;
  std::size_t halvings = 0;

  double v0() const { return v.front(); }
};

/// Path restricted to [0, t], inserting the interpolated endpoint if t is off-grid.
EnvPath restrict_path(const EnvPath& env, double t);

/// RK4 on the grid with Richardson step-halving. The K0 flavor uses psi0, otherwise psi.
FlowSolution solve_backward(const Mechanism& mech, double lambda, double t, const EnvPath& env, FlowOptions opt = {});

std::string flow_csv(const FlowSolution& sol);

/// exp{ int_0^t e^{-u} K_u du + e^{-t} log lambda } with K linear between grid points.
double closed_form_neveu(double lambda, double t, const EnvPath& env);

/// int_0^t e^{-u} delta_u du for the linearly interpolated path.
double neveu_path_integral(const EnvPath& env, double t);

/// ((lambda e^{alpha t})^{-1} + gamma2 int_0^t e^{-(delta_u + alpha u)} du)^{-1}; lambda may be infinite.
double closed_form_feller(double lambda, double t, const EnvPath& env, double alpha, double gamma2);

/// ((lambda e^{alpha t})^{-beta} + beta c int_0^t e^{-beta(delta_u + alpha u)} du)^{-1/beta}.
/// On a K0 path alpha is already inside delta and is ignored. lambda = 0 and infinity are accepted.
double closed_form_stable(double lambda, double t, const EnvPath& env, double beta, double c, double alpha);

/// v_t(0, lambda, env): closed form when one exists, otherwise the ODE.
double flow_value(const Mechanism& mech, double lambda, double t, const EnvPath& env, FlowOptions opt = {});

/// E_z[exp{-lambda Z_t e^{-delta_t}} | environment] = exp{-z v_t(0, lambda, delta)}.
double cond_laplace(double z, double lambda, double t, const EnvPath& env, const Mechanism& mech, FlowOptions opt = {});

struct CondProb {
  double value = 0.0;
  std::string note;
};

/// P_z(Z_t > 0 | K) for Feller and stable mechanisms.
CondProb cond_survival(double z, double t, const EnvPath& env, const Mechanism& mech);

/// P_z(Z_t = infinity | K) for stable mechanisms.
CondProb cond_explosion(double z, double t, const EnvPath& env, const Mechanism& mech);

/// Stable parameters (beta, c, alpha) of a Feller or stable mechanism; Unsupported otherwise.
struct StableView {
  double beta, c, alpha;
};
StableView stable_view(const Mechanism& mech);

}  // namespace cbbre
