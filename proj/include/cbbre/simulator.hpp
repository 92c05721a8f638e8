#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cbbre/environment.hpp"
#include "cbbre/mechanism.hpp"
#include "cbbre/rng.hpp"

namespace cbbre {

enum class Scheme {
  Euler,    // explicit Euler, full truncation inside the square root
  LogSplit  // linear drift and environment applied as the exact factor e^{alpha dt + dK}
};

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SimConfig {
  double dt = 1e-3;
  double eps_jump = 1e-3;  // jumps below eps_jump * max(1, Z) are replaced by their mean and variance
  double eps_abs = 1e-10;
  double m_expl = 1e9;
  Scheme scheme = Scheme::Euler;
  std::uint64_t seed = 0;
  double stop_above = std::numeric_limits<double>::infinity();  // end the run early once Z exceeds this
  bool record_full = false;
  std::vector<double> record_times;  // snapshot times (nearest grid step at or after each)
};

void validate(const SimConfig& cfg, double z0);

struct SimPath {
  std::vector<double> t;  // full grid when record_full
  std::vector<double> z;
  std::vector<double> snapshots;  // Z at cfg.record_times
  std::vector<double> env_snapshots;  // K at cfg.record_times
  EnvPath env;  // kept only when record_full
  double z_final = 0.0;
  double k_final = 0.0;  // K at the end of the run
  double t_final = 0.0;
  std::optional<double> T0;
  std::optional<double> Tinf;
  bool stopped_high = false;
};

/// CBBRE path; the environment is sample_env_path(sigma, -sigma^2/2, T, N, seed, path_id, K).
SimPath simulate_cbbre(const Mechanism& mech, double sigma, double z0, double T, const SimConfig& cfg,
                       std::uint64_t path_id = 0);

/// CBIBRE path; zero is not absorbing.
SimPath simulate_cbibre(const Mechanism& mech, const ImmigrationMechanism& imm, double sigma, double z0, double T,
                        const SimConfig& cfg, std::uint64_t path_id = 0);

/// Jump increment over dt for a stable mechanism at state z (large jumps exact, small ones replaced).
double simulate_stable_jumps(double z, double dt, double beta, double c, double eps_jump, Rng& rng);

/// Stable jump intensity constant: density c beta (beta+1)/Gamma(1-beta) x^{-2-beta} per unit mass.
double stable_jump_constant(double beta, double c);

struct Events {
  std::optional<double> T0;
  std::optional<double> Tinf;
};

/// First passage below eps_abs and above m_expl; they are mutually exclusive.
Events detect_events(const std::vector<double>& t, const std::vector<double>& z, double eps_abs, double m_expl);

struct MartingaleReport {
  double mean_scaled = 0.0;  // E[Z_T e^{-K0_T}]
  double se_scaled = 0.0;
  bool supermartingale_ok = false;
  double r2 = 0.0;  // binned E[Z_T | K] against z0 e^{K0_T}
  double p_w0 = 0.0;
  double se_p_w0 = 0.0;
  std::size_t n = 0;
};

/// Checks on Z e^{-K0}: alpha is the SDE drift, so K0 = K + alpha t.
MartingaleReport martingale_diagnostics(const std::vector<SimPath>& paths, double z0, double alpha, int bins = 20);

std::string sim_path_csv(const SimPath& path);

/// K0 = K + alpha t from a K path.
EnvPath to_k0(const EnvPath& k, double alpha);

}  // namespace cbbre
