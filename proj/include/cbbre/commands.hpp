#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cbbre/config.hpp"

namespace cbbre {

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
};

struct RunResult {
  int exit_code = 0;  // 0 all checks pass, 1 a numerical check failed
  nlohmann::json summary;
  std::vector<Table> tables;
  std::vector<std::string> failures;  // names of failed checks
};

/// Runs the experiment named by cfg.kind. Invalid parameter combinations throw Error.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Writes summary.json and one CSV per table into dir (created if missing).
void write_artifacts(const RunResult& r, const std::string& dir);

/// Shortest round-trip decimal form used in every CSV cell.
std::string fmt(double x);

}  // namespace cbbre
