#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cbbre/rng.hpp"
#include "cbbre/stats.hpp"

namespace cbbre {

/// K = sigma B - sigma^2 t / 2; K0 = sigma B + m t; Drifted = sigma B + drift t for any other drift.
enum class PathFlavor { K, K0, Drifted };

const char* to_string(PathFlavor f);

/// Discretized environment; linear interpolation between grid points is the path model.
struct EnvPath {
  std::vector<double> t;
  std::vector<double> values;
  PathFlavor flavor = PathFlavor::K;
  double sigma = 0.0;
  double drift = 0.0;
  bool adaptive = false;

  double horizon() const { return t.back(); }
  std::size_t steps() const { return t.size() - 1; }
  /// Linear interpolation at time s in [0, horizon()].
  double at(double s) const;
};

/// Exact Gaussian increments on a uniform grid; stream (seed, path, Environment).
EnvPath sample_env_path(double sigma, double drift, double T, std::size_t N, std::uint64_t seed,
                        std::uint64_t path = 0, PathFlavor flavor = PathFlavor::Drifted);

/// Path built from given values (validated: values[0] = 0, increasing grid).
EnvPath make_env_path(std::vector<double> t, std::vector<double> values, PathFlavor flavor, double sigma,
                      double drift);

/// Brownian-bridge midpoint refinement: halves every step, keeping the coarse values.
EnvPath refine_path(const EnvPath& path, std::uint64_t seed, std::uint64_t path_id = 0);

/// Write (t, K_t) rows.
std::string env_path_csv(const EnvPath& path);

enum class ExpRule {
  Trapezoid,        // trapezoid on exp of grid values
  ExactLinear,      // exact integral of exp of the linearly interpolated path
  BridgeCorrected   // conditional expectation given the grid under a Brownian bridge
};

const char* to_string(ExpRule r);

struct ExpFunctional {
  double value = 0.0;
  double log_value = 0.0;
  double T = 0.0;
  ExpRule rule = ExpRule::Trapezoid;
  bool saturated = false;  // value overflowed double; log_value is still exact
};

/// int_0^T exp{theta K_s + rho s} ds, accumulated in log space.
ExpFunctional exp_functional(const EnvPath& path, double theta, ExpRule rule = ExpRule::Trapezoid, double rho = 0.0);

/// Log of the integral of exp{a + b u + q u (h-u)} over one cell of width h (q is the bridge term).
double log_cell_integral(double la, double lb, double h, double q);

/// Sample I_t^{(eta)} = int_0^t exp{2(eta s + B_s)} ds on N uniform steps without storing the path.
double sample_exp_functional(double eta, double t, std::size_t N, Rng& rng, ExpRule rule = ExpRule::BridgeCorrected);

/// Gamma shape -eta of 1/(2 I_infinity^{(eta)}); eta must be negative.
double dufresne_law(double eta);

struct MYOptions {
  double nu_min = 0.25;
  double log_r_min = -50.0;
  double log_r_max = 6.5;
  double log_r_step = 0.04;
  double log_v_min = -160.0;
  double log_v_max = 6.0;
  double log_v_step = 0.02;
};

/// Hartman-Watson type kernel theta_r(t) with oscillation-aware quadrature.
double hw_kernel(double r, double t, double t_min = 0.25);

/// Density of 1/(2 I_nu^{(eta)}) from the joint law of (I_nu, B_nu + eta nu).
/// The kernel is tabulated once on a log-r grid; p(v) is then a Gaussian-weighted sum.
class MYDensity {
 public:
  MYDensity(double nu, double eta, MYOptions opt = {});

  double nu() const { return nu_; }
  double eta() const { return eta_; }
  double pdf(double v) const;
  double log_pdf(double v) const;
  /// CDF by cumulative quadrature on the log-v grid (linear interpolation between nodes).
  double cdf(double v) const;
  /// E[g(V)] by quadrature on the log-v grid.
  double expect(const std::function<double(double)>& g) const;
  double normalization() const { return cum_.back(); }
  const std::vector<double>& log_v_grid() const { return u_; }
  const std::vector<double>& pdf_grid() const { return p_; }

 private:
  double nu_, eta_;
  MYOptions opt_;
  std::vector<double> s_, theta_;  // log r nodes and kernel values
  std::vector<double> u_, p_, cum_;
  double log_pref_ = 0.0;
};

struct Lemma1Report {
  MCEstimate lhs;             // E[(I_t^{(eta)})^{-p}]
  MCEstimate rhs;             // e^{(2p^2-2p eta)t} E[(I_t^{(2p-eta)})^{-p}]
  MCEstimate ineq_lhs;        // E[(I_t^{(eta)})^{-2p}]
  MCEstimate inequality_rhs;  // e^{(2p^2-2p eta)t} E[(I_{t/2}^{(2p-eta)})^{-p}] E[(I_{t/2}^{(eta-2p)})^{-p}]
  bool identity_ok = false;
  bool inequality_ok = false;
};

Lemma1Report lemma1_moments(double eta, double p, double t, std::size_t n_mc, std::uint64_t seed,
                            std::size_t steps = 400, int workers = 1);

}  // namespace cbbre
