// Runs every acceptance criterion at its pinned parameters, then reruns them for the reproducibility check.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "cbbre/verify.hpp"

int main(int argc, char** argv) {
  cbbre::VerifyOptions opt;
  const bool skip_rerun = argc > 1 && std::string(argv[1]) == "--no-rerun";
  std::vector<std::string> first;
  int failed = 0;
  for (int id = 1; id <= cbbre::kCriteria; ++id) {
    const auto t0 = std::chrono::steady_clock::now();
    const cbbre::CheckResult r = cbbre::run_criterion(id, opt);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    first.push_back(cbbre::to_json(r).dump());
    failed += r.pass ? 0 : 1;
    std::printf("criterion %2d %s  %s  (%.1f s)\n", id, r.pass ? "PASS" : "FAIL", r.name.c_str(), sec);
    std::printf("    %s\n", r.detail.dump().c_str());
    std::fflush(stdout);
  }
  if (skip_rerun) return failed == 0 ? 0 : 1;
  bool same = true;
  for (int id = 1; id <= cbbre::kCriteria; ++id) {
    const std::string again = cbbre::to_json(cbbre::run_criterion(id, opt)).dump();
    if (again != first[static_cast<std::size_t>(id - 1)]) {
      same = false;
      std::printf("    criterion %d differs on rerun\n", id);
    }
  }
  failed += same ? 0 : 1;
  std::printf("criterion 18 %s  byte-identical JSON on rerun\n", same ? "PASS" : "FAIL");
  return failed == 0 ? 0 : 1;
}
