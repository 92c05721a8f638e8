#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbbre/environment.hpp"
#include "cbbre/flow.hpp"
#include "cbbre/mechanism.hpp"
#include "cbbre/stats.hpp"

namespace cbbre {

/// E_z[exp{-lambda Z_t e^{-K0_t}} | K0] for a finite-mean mechanism. env must be a K0 path.
/// The flow is solved on the path with linear midpoints inserted and the immigration
/// integral uses Simpson's rule on each original cell.
double cbibre_cond_laplace(double z, double lambda, double t, const EnvPath& env, const Mechanism& mech,
                           const ImmigrationMechanism& imm, FlowOptions opt = {});

/// A_t = int_0^t e^{-beta K0_s} ds for the linearly interpolated path.
double stable_functional(const EnvPath& env, double t, double beta);

/// Closed form for psi(u) = -alpha u + c u^{1+beta}, phi(u) = kappa u^beta on a K0 path.
double stable_cbibre_laplace(double z, double lambda, double t, const EnvPath& env, double beta, double c,
                             double kappa);

/// z = 0 factor exp{-(kappa/(beta c)) log(beta c lambda^beta A_t + 1)}.
double entrance_law(double lambda, double t, const EnvPath& env, double beta, double c, double kappa);

struct ImmLongtermOptions {
  std::vector<double> horizons{20.0, 40.0};
  std::size_t n_mc = 4000;
  std::size_t steps_per_unit = 100;
  std::uint64_t seed = 0;
  int workers = 1;
  double dt = 1e-2;  // simulation step for the divergence evidence
  std::vector<double> sim_times{5.0, 10.0, 20.0};
  std::size_t n_sim = 1000;
};

struct ImmLongtermReport {
  std::string verdict;  // "converges" or "diverges"
  double T_trunc = 0.0;  // horizon with e^{-beta m T} = 1e-6 (m > 0)
  std::vector<double> horizons;
  std::vector<MCEstimate> transform;  // limit transform with A_inf replaced by A_T
  double transform_gamma = 1.0;       // A_inf = 2 / (beta^2 sigma^2 Gamma_{-eta}) by quadrature
  std::vector<double> sim_times;
  std::vector<double> median_z;  // m <= 0: medians of simulated Z_T
  std::vector<double> frac_above;  // m <= 0: fraction with Z_T e^{-K0_T} above 10 z + 10
};

/// Long-term behavior of the stable (or Feller, beta = 1) CBIBRE with phi(u) = kappa u^beta.
ImmLongtermReport cbibre_longterm(double z, double lambda, const EnvParams& env, double kappa,
                                  const ImmLongtermOptions& opt);

}  // namespace cbbre
