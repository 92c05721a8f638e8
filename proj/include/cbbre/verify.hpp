#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace cbbre {

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  int workers = 1;
  double scale = 1.0;  // multiplies every Monte Carlo sample size (acceptance runs use 1)
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  nlohmann::json detail;  // deterministic given the options; no timings
};

inline constexpr int kCriteria = 17;

/// Acceptance criterion 1..17 at its pinned parameters and tolerances.
CheckResult run_criterion(int id, const VerifyOptions& opt);

/// Suite name to criterion ids; "acceptance" is all of them.
std::vector<int> suite_criteria(const std::string& suite);
const std::vector<std::string>& suite_names();

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opt);

nlohmann::json to_json(const CheckResult& r);

}  // namespace cbbre
