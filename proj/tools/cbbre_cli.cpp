// cbbre: command-line front end. Exit codes: 0 pass, 1 numerical failure, 2 schema or usage error.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cbbre/commands.hpp"
#include "cbbre/config.hpp"
#include "cbbre/error.hpp"
#include "cbbre/verify.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> suite;
  std::optional<std::string> regime;
};

bool usage_error(cbbre::ErrorKind k) {
  using cbbre::ErrorKind;
  return k == ErrorKind::Schema || k == ErrorKind::Parameter || k == ErrorKind::Domain ||
         k == ErrorKind::Unsupported || k == ErrorKind::Method || k == ErrorKind::Regime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CB processes in a Brownian random environment"};
  app.require_subcommand(1);
  Flags f;
  for (const std::string& kind : cbbre::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
    sub->add_option("--config", f.config, "JSON configuration file");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", f.out, "output directory");
    if (kind == "verify") sub->add_option("--suite", f.suite, "verification suite");
    if (kind == "asymptotics") sub->add_option("--regime", f.regime, "expected regime or 'auto'");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string kind = app.get_subcommands().front()->get_name();

  cbbre::ExperimentConfig cfg;
  try {
    if (!f.config.empty()) cfg = cbbre::load_config(f.config);
    if (!cfg.kind.empty() && cfg.kind != kind)
      throw cbbre::Error(cbbre::ErrorKind::Schema,
                         "field 'kind': config is for '" + cfg.kind + "' but subcommand is '" + kind + "'");
    cfg.kind = kind;
    if (f.seed) cfg.seed = *f.seed;
    if (f.workers) cfg.workers = *f.workers;
    if (f.out) cfg.out_dir = *f.out;
    if (f.suite) cfg.suite = *f.suite;
    if (f.regime) cfg.regime = *f.regime;
    if (kind == "verify") cbbre::suite_criteria(cfg.suite);
  } catch (const cbbre::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  cbbre::RunResult res;
  try {
    res = cbbre::run_experiment(cfg);
  } catch (const cbbre::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage_error(e.kind()) ? 2 : 1;
  }
  cbbre::write_artifacts(res, cfg.out_dir);
  for (const auto& name : res.failures) std::cerr << "FAILED: " << name << '\n';
  std::cout << (res.exit_code == 0 ? "ok" : "failed") << ": " << kind << " -> " << cfg.out_dir << '\n';
  return res.exit_code;
}
