#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cbbre/environment.hpp"
#include "cbbre/mechanism.hpp"
#include "cbbre/simulator.hpp"

namespace cbbre {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Experiment kinds, one per subcommand.
const std::vector<std::string>& experiment_kinds();

struct Numerics {
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t n_mc = 10000;
  std::size_t n_paths = 10000;
  double eps_jump = 1e-3;
  double eps_abs = 1e-10;
  double m_expl = 1e9;
  Scheme scheme = Scheme::Euler;
  ExpRule rule = ExpRule::BridgeCorrected;
  double tol = 1e-6;
};

struct ExperimentConfig {
  std::string kind;
  Mechanism mech = Feller{};
  double sigma = 1.0;
  std::optional<ImmigrationMechanism> imm;
  std::uint64_t seed = kDefaultSeed;
  bool seed_given = false;
  int workers = 1;
  Numerics num;

  std::vector<double> z{1.0};
  std::vector<double> t{1.0};
  std::vector<double> lambda{1.0};
  std::string method = "both";  // mc | quadrature | both
  std::string regime = "auto";
  std::string suite = "closed-forms";
  std::optional<double> gap_tol;
  std::string out_dir = "out";

  SimConfig sim_config() const;
};

/// Parses and validates a JSON document. Errors are ErrorKind::Schema with the line or field at fault.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads a file; relative paths that do not exist are retried under $CBBRE_CONFIG_DIR.
ExperimentConfig load_config(const std::string& path);

Mechanism parse_mechanism(const nlohmann::json& j, const std::string& where = "mechanism");
nlohmann::json mechanism_json(const Mechanism& mech);
nlohmann::json immigration_json(const ImmigrationMechanism& imm);

}  // namespace cbbre
