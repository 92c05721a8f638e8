#include "cbbre/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cbbre/error.hpp"

namespace cbbre {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::Schema, "field '" + field + "': " + msg);
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) schema_fail(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) schema_fail(where + "." + key, "unknown key");
  }
}

double get_num(const json& j, const std::string& key, const std::string& where, double dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number()) schema_fail(where + "." + key, "expected a number");
  return v.get<double>();
}

double get_positive(const json& j, const std::string& key, const std::string& where, double dflt) {
  const double v = get_num(j, key, where, dflt);
  if (!(v > 0.0)) schema_fail(where + "." + key, "must be positive");
  return v;
}

std::size_t get_count(const json& j, const std::string& key, const std::string& where, std::size_t dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) schema_fail(where + "." + key, "expected a positive integer");
  return v.get<std::size_t>();
}

std::string get_str(const json& j, const std::string& key, const std::string& where, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string()) schema_fail(where + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

// A number or a list of numbers.
std::vector<double> get_list(const json& j, const std::string& key, const std::string& where,
                             std::vector<double> dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) schema_fail(where + "." + key, "expected a number or a non-empty list");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) schema_fail(where + "." + key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

JumpTable parse_table(const json& j, const std::string& where) {
  check_keys(j, where, {"x", "density", "tail_mass", "tail_point"});
  JumpTable t;
  t.x = get_list(j, "x", where, {});
  t.density = get_list(j, "density", where, {});
  if (t.x.empty()) schema_fail(where + ".x", "required");
  if (t.x.size() != t.density.size()) schema_fail(where + ".density", "length must match x");
  t.tail_mass = get_num(j, "tail_mass", where, 0.0);
  t.tail_point = get_num(j, "tail_point", where, 0.0);
  return t;
}

// Rewrites Parameter errors from the model validators as schema errors naming the block.
template <class F>
void validated(const std::string& where, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parameter) schema_fail(where, e.what());
    throw;
  }
}

std::string line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"simulate",  "survival",    "explosion",   "asymptotics",
                                              "qprocess",  "conditioned", "immigration", "verify"};
  return kinds;
}

Mechanism parse_mechanism(const json& j, const std::string& where) {
  if (!j.is_object()) schema_fail(where, "expected an object");
  const std::string type = get_str(j, "type", where, "");
  Mechanism m;
  if (type == "neveu") {
    check_keys(j, where, {"type"});
    m = Neveu{};
  } else if (type == "feller") {
    check_keys(j, where, {"type", "alpha", "gamma2"});
    m = Feller{get_num(j, "alpha", where, 0.0), get_num(j, "gamma2", where, 1.0)};
  } else if (type == "stable") {
    check_keys(j, where, {"type", "alpha", "beta", "c"});
    m = Stable{get_num(j, "alpha", where, 0.0), get_num(j, "beta", where, 0.5), get_num(j, "c", where, 1.0)};
  } else if (type == "general") {
    check_keys(j, where, {"type", "q", "a", "gamma2", "mu"});
    GeneralCB g;
    g.q = get_num(j, "q", where, 0.0);
    g.a = get_num(j, "a", where, 0.0);
    g.gamma2 = get_num(j, "gamma2", where, 0.0);
    if (j.contains("mu")) g.mu = parse_table(j.at("mu"), where + ".mu");
    m = g;
  } else {
    schema_fail(where + ".type", "expected one of neveu, feller, stable, general");
  }
  validated(where, [&] { validate(m); });
  return m;
}

json mechanism_json(const Mechanism& mech) {
  json j;
  j["type"] = kind_name(mech);
  if (const auto* f = std::get_if<Feller>(&mech)) {
    j["alpha"] = f->alpha;
    j["gamma2"] = f->gamma2;
  } else if (const auto* s = std::get_if<Stable>(&mech)) {
    j["alpha"] = s->alpha;
    j["beta"] = s->beta;
    j["c"] = s->c;
  } else if (const auto* g = std::get_if<GeneralCB>(&mech)) {
    j["q"] = g->q;
    j["a"] = g->a;
    j["gamma2"] = g->gamma2;
    j["mu"] = {{"x", g->mu.x}, {"density", g->mu.density}, {"tail_mass", g->mu.tail_mass},
               {"tail_point", g->mu.tail_point}};
  }
  return j;
}

json immigration_json(const ImmigrationMechanism& imm) {
  json j;
  j["d"] = imm.d;
  if (imm.stable) j["stable"] = {{"beta", imm.stable->beta}, {"kappa", imm.stable->kappa}};
  if (imm.table) j["table"] = {{"x", imm.table->x}, {"density", imm.table->density}};
  return j;
}

SimConfig ExperimentConfig::sim_config() const {
  SimConfig c;
  c.dt = num.dt;
  c.eps_jump = num.eps_jump;
  c.eps_abs = num.eps_abs;
  c.m_expl = num.m_expl;
  c.scheme = num.scheme;
  c.seed = seed;
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, source + ": " + line_of(text, e.byte) + ": malformed JSON");
  }
  check_keys(doc, "<root>",
             {"schema_version", "kind", "mechanism", "environment", "immigration", "seed", "workers", "numerics",
              "experiment", "output"});
  ExperimentConfig c;
  if (doc.contains("schema_version")) {
    if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion)
      schema_fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  c.kind = get_str(doc, "kind", "<root>", "");
  if (!c.kind.empty() &&
      std::find(experiment_kinds().begin(), experiment_kinds().end(), c.kind) == experiment_kinds().end())
    schema_fail("kind", "unknown experiment kind '" + c.kind + "'");

  if (doc.contains("mechanism")) c.mech = parse_mechanism(doc["mechanism"]);
  if (doc.contains("environment")) {
    const json& e = doc["environment"];
    check_keys(e, "environment", {"sigma"});
    c.sigma = get_num(e, "sigma", "environment", 1.0);
    if (!(c.sigma >= 0.0)) schema_fail("environment.sigma", "must be nonnegative");
  }
  if (doc.contains("immigration")) {
    const json& im = doc["immigration"];
    check_keys(im, "immigration", {"d", "stable", "table"});
    ImmigrationMechanism imm;
    imm.d = get_num(im, "d", "immigration", 0.0);
    if (im.contains("stable")) {
      check_keys(im["stable"], "immigration.stable", {"beta", "kappa"});
      imm.stable = StableImmigration{get_num(im["stable"], "beta", "immigration.stable", 0.5),
                                     get_num(im["stable"], "kappa", "immigration.stable", 1.0)};
    }
    if (im.contains("table")) imm.table = parse_table(im["table"], "immigration.table");
    validated("immigration", [&] { validate(imm); });
    c.imm = imm;
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) schema_fail("seed", "expected a nonnegative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
    c.seed_given = true;
  }
  if (doc.contains("workers")) {
    if (!doc["workers"].is_number_integer() || doc["workers"].get<int>() < 1)
      schema_fail("workers", "expected a positive integer");
    c.workers = doc["workers"].get<int>();
  }
  if (doc.contains("numerics")) {
    const json& n = doc["numerics"];
    const std::string w = "numerics";
    check_keys(n, w, {"dt", "steps", "n_mc", "n_paths", "eps_jump", "eps_abs", "m_expl", "scheme", "rule", "tol"});
    c.num.dt = get_positive(n, "dt", w, c.num.dt);
    c.num.steps = get_count(n, "steps", w, c.num.steps);
    c.num.n_mc = get_count(n, "n_mc", w, c.num.n_mc);
    c.num.n_paths = get_count(n, "n_paths", w, c.num.n_paths);
    c.num.eps_jump = get_positive(n, "eps_jump", w, c.num.eps_jump);
    if (c.num.eps_jump >= 1.0) schema_fail(w + ".eps_jump", "must lie in (0,1)");
    c.num.eps_abs = get_positive(n, "eps_abs", w, c.num.eps_abs);
    c.num.m_expl = get_positive(n, "m_expl", w, c.num.m_expl);
    c.num.tol = get_positive(n, "tol", w, c.num.tol);
    const std::string scheme = get_str(n, "scheme", w, "euler");
    try {
      c.num.scheme = parse_scheme(scheme);
    } catch (const Error&) {
      schema_fail(w + ".scheme", "expected euler or log_split");
    }
    const std::string rule = get_str(n, "rule", w, "bridge_corrected");
    if (rule == "trapezoid") c.num.rule = ExpRule::Trapezoid;
    else if (rule == "exact_linear") c.num.rule = ExpRule::ExactLinear;
    else if (rule == "bridge_corrected") c.num.rule = ExpRule::BridgeCorrected;
    else schema_fail(w + ".rule", "expected trapezoid, exact_linear or bridge_corrected");
  }
  if (doc.contains("experiment")) {
    const json& x = doc["experiment"];
    const std::string w = "experiment";
    check_keys(x, w, {"z", "t", "lambda", "method", "regime", "suite", "gap_tol"});
    c.z = get_list(x, "z", w, c.z);
    c.t = get_list(x, "t", w, c.t);
    c.lambda = get_list(x, "lambda", w, c.lambda);
    for (double v : c.z)
      if (!(v >= 0.0)) schema_fail(w + ".z", "values must be nonnegative");
    for (double v : c.t)
      if (!(v > 0.0)) schema_fail(w + ".t", "values must be positive");
    for (double v : c.lambda)
      if (!(v >= 0.0)) schema_fail(w + ".lambda", "values must be nonnegative");
    c.method = get_str(x, "method", w, c.method);
    if (c.method != "mc" && c.method != "quadrature" && c.method != "both")
      schema_fail(w + ".method", "expected mc, quadrature or both");
    c.regime = get_str(x, "regime", w, c.regime);
    c.suite = get_str(x, "suite", w, c.suite);
    if (x.contains("gap_tol")) c.gap_tol = get_positive(x, "gap_tol", w, 0.1);
  }
  if (doc.contains("output")) {
    check_keys(doc["output"], "output", {"dir"});
    c.out_dir = get_str(doc["output"], "dir", "output", c.out_dir);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (!fs::exists(p) && p.is_relative()) {
    if (const char* dir = std::getenv("CBBRE_CONFIG_DIR")) {
      const fs::path alt = fs::path(dir) / p;
      if (fs::exists(alt)) p = alt;
    }
  }
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::Schema, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), p.string());
}

}  // namespace cbbre
