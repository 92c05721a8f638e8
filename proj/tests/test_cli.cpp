#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "cbbre/commands.hpp"
#include "cbbre/config.hpp"
#include "cbbre/error.hpp"

using namespace cbbre;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cbbre_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(CBBRE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kStrong = R"({
  "schema_version": 1,
  "kind": "asymptotics",
  "mechanism": {"type": "feller", "alpha": -1.5, "gamma2": 1.0},
  "environment": {"sigma": 1.0},
  "seed": 7,
  "experiment": {"z": [1.0], "t": [10, 20]}
})";

}  // namespace

TEST_CASE("config parsing reports the line of malformed JSON") {
  try {
    parse_config("{\n  \"kind\": \"survival\",\n  \"seed\": ,\n}", "bad.json");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("config parsing names the offending field") {
  try {
    parse_config(R"({"kind": "survival", "numerics": {"dt": -1}})");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("numerics.dt") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"kind": "survival", "bogus": 1})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"kind": "nope"})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"mechanism": {"type": "stable", "beta": 0.5, "c": -1}})"), Error);
}

TEST_CASE("config round trip of mechanisms") {
  const ExperimentConfig c = parse_config(kStrong);
  CHECK(c.kind == "asymptotics");
  CHECK(c.seed == 7);
  CHECK(mechanism_json(c.mech)["alpha"] == -1.5);
  CHECK(parse_mechanism(mechanism_json(Stable{0.1, -0.5, -2.0})).index() == 2);
}

TEST_CASE("malformed config exits 2 without artifacts") {
  const fs::path d = scratch("malformed");
  write(d / "bad.json", "{\"kind\": \"survival\", \"seed\": }");
  CHECK(run("survival --config " + (d / "bad.json").string() + " --out " + (d / "out").string()) == 2);
  CHECK(!fs::exists(d / "out"));
  write(d / "unknown.json", R"({"kind": "survival", "experiment": {"zz": 1}})");
  CHECK(run("survival --config " + (d / "unknown.json").string() + " --out " + (d / "out").string()) == 2);
  CHECK(!fs::exists(d / "out"));
  CHECK(run("verify --suite no-such-suite --out " + (d / "out").string()) == 2);
  CHECK(!fs::exists(d / "out"));
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("asymptotics reports the strongly subcritical constant") {
  const fs::path d = scratch("asymptotics");
  write(d / "c.json", kStrong);
  REQUIRE(run("asymptotics --regime auto --config " + (d / "c.json").string() + " --out " + (d / "out").string()) == 0);
  const auto s = nlohmann::json::parse(read(d / "out" / "summary.json"));
  CHECK(s["regime"] == "strongly_subcritical");
  CHECK(s["results"][0]["constant"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(read(d / "out" / "trend.csv").rfind("z,t,scaled_P,constant,rel_gap\n", 0) == 0);
  CHECK(run("asymptotics --regime critical --config " + (d / "c.json").string() + " --out " + (d / "o2").string()) ==
        2);
}

TEST_CASE("kind mismatch between config and subcommand is a usage error") {
  const fs::path d = scratch("mismatch");
  write(d / "c.json", kStrong);
  CHECK(run("survival --config " + (d / "c.json").string() + " --out " + (d / "out").string()) == 2);
}

TEST_CASE("survival output is tidy and reproducible") {
  const fs::path d = scratch("survival");
  write(d / "c.json", R"({"kind": "survival", "mechanism": {"type": "feller", "alpha": 0.0, "gamma2": 1.0},
    "numerics": {"n_mc": 2000, "steps": 200},
    "experiment": {"z": [1.0], "t": [1.0, 2.0], "method": "both"}})");
  REQUIRE(run("survival --config " + (d / "c.json").string() + " --seed 3 --out " + (d / "a").string()) == 0);
  REQUIRE(run("survival --config " + (d / "c.json").string() + " --seed 3 --workers 2 --out " + (d / "b").string()) ==
          0);
  const std::string csv = read(d / "a" / "survival.csv");
  CHECK(csv.rfind("z,t,P,SE,method\n", 0) == 0);
  CHECK(csv == read(d / "b" / "survival.csv"));
  CHECK(read(d / "a" / "summary.json") == read(d / "b" / "summary.json"));
  const auto s = nlohmann::json::parse(read(d / "a" / "summary.json"));
  CHECK(s["manifest"]["seed"] == 3);
  CHECK(s["schema_version"] == kSchemaVersion);
}

TEST_CASE("config directory from the environment") {
  const fs::path d = scratch("confdir");
  write(d / "strong.json", kStrong);
  setenv("CBBRE_CONFIG_DIR", d.c_str(), 1);
  CHECK(load_config("strong.json").kind == "asymptotics");
  CHECK(run("asymptotics --config strong.json --out " + (d / "out").string()) == 0);
  unsetenv("CBBRE_CONFIG_DIR");
}

TEST_CASE("verify closed-forms suite passes") {
  const fs::path d = scratch("verify");
  CHECK(run("verify --suite closed-forms --out " + (d / "out").string()) == 0);
  const auto s = nlohmann::json::parse(read(d / "out" / "summary.json"));
  CHECK(s["pass"] == true);
  CHECK(s["criteria"].size() == 2);
}

TEST_CASE("in-process runs are deterministic") {
  ExperimentConfig c = parse_config(kStrong);
  const RunResult a = run_experiment(c);
  const RunResult b = run_experiment(c);
  CHECK(a.summary.dump() == b.summary.dump());
  CHECK(a.exit_code == 0);
  c.gap_tol = 1e-9;
  const RunResult f = run_experiment(c);
  CHECK(f.exit_code == 1);
  CHECK(!f.failures.empty());
}
