#include "cbbre/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "cbbre/error.hpp"
#include "cbbre/stats.hpp"

namespace cbbre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Jumps of a tabulated measure restricted to [eps, inf), drawn by segment then by inverting the linear density.
struct TableSampler {
  std::vector<double> a, b, da, db, cum;
  double atom_x = 0.0, atom_mass = 0.0;
  double mass = 0.0;       // total mass above eps
  double comp_mean = 0.0;  // int_[eps,1) x mu(dx)
  double small_mean = 0.0; // int_(0,eps) x mu(dx)
  double small_var = 0.0;  // int_(0,eps) x^2 mu(dx)

  TableSampler() = default;
  TableSampler(const JumpTable& t, double eps) {
    for (std::size_t i = 0; i + 1 < t.x.size(); ++i) {
      const double x0 = std::max(t.x[i], eps), x1 = t.x[i + 1];
      if (x1 <= x0) continue;
      auto interp = [&](double x) {
        return t.density[i] + (t.density[i + 1] - t.density[i]) * (x - t.x[i]) / (t.x[i + 1] - t.x[i]);
      };
      a.push_back(x0);
      b.push_back(x1);
      da.push_back(interp(x0));
      db.push_back(interp(x1));
      mass += 0.5 * (da.back() + db.back()) * (x1 - x0);
      cum.push_back(mass);
    }
    if (t.tail_mass > 0.0 && t.tail_point >= eps) {
      atom_x = t.tail_point;
      atom_mass = t.tail_mass;
      mass += atom_mass;
    }
    comp_mean = jump_moment(t, 1.0, eps, 1.0);
    small_mean = jump_moment(t, 1.0, 0.0, eps);
    small_var = jump_moment(t, 2.0, 0.0, eps);
  }

  double sample(Rng& rng) const {
    const double target = rng.uniform() * mass;
    if (cum.empty() || target >= cum.back()) return atom_x;
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
    const double before = i == 0 ? 0.0 : cum[i - 1];
    const double w = b[i] - a[i], slope = (db[i] - da[i]) / w, r = target - before;
    double s;
    if (std::fabs(slope) * w < 1e-12 * std::max(da[i], 1e-300)) {
      s = r / da[i];
    } else {
      s = (-da[i] + std::sqrt(std::max(0.0, da[i] * da[i] + 2.0 * slope * r))) / slope;
    }
    return a[i] + std::clamp(s, 0.0, w);
  }
};

enum class JumpKind { None, StablePos, StableNeg, Neveu, Table };

struct Engine {
  double alpha = 0.0, gamma2 = 0.0, q = 0.0, sigma = 0.0, eps = 1e-3;
  JumpKind kind = JumpKind::None;
  double C = 0.0, beta = 0.0;
  TableSampler table;
  // immigration
  double d = 0.0;
  bool imm_stable = false, imm_table = false;
  double ib = 0.0, ik = 0.0, imm_rate = 0.0, imm_small_mean = 0.0;
  TableSampler itable;

  // Jump threshold scales with the state so the number of exact jumps per step stays bounded.
  double level(double z) const { return eps * std::max(1.0, z); }

  double jumps(double z, double h, Rng& rng) const {
    if (z <= 0.0) return 0.0;
    switch (kind) {
      case JumpKind::None: return 0.0;
      case JumpKind::StablePos: {
        const double eps = level(z);
        const auto n = rng.poisson(z * h * C * std::pow(eps, -1.0 - beta) / (1.0 + beta));
        double big = 0.0;
        for (std::uint64_t j = 0; j < n; ++j) big += eps * std::pow(rng.uniform_pos(), -1.0 / (1.0 + beta));
        const double comp = z * h * C * std::pow(eps, -beta) / beta;
        const double sd = std::sqrt(z * h * C * std::pow(eps, 1.0 - beta) / (1.0 - beta));
        return big - comp + sd * rng.normal();
      }
      case JumpKind::StableNeg: {
        const double eps = level(z);
        const auto n = rng.poisson(z * h * C * std::pow(eps, -1.0 - beta) / (1.0 + beta));
        double big = 0.0;
        for (std::uint64_t j = 0; j < n; ++j) big += eps * std::pow(rng.uniform_pos(), -1.0 / (1.0 + beta));
        return big + z * h * C * std::pow(eps, -beta) / (-beta);
      }
      case JumpKind::Neveu: {
        const double eps = level(z);
        const auto n = rng.poisson(z * h / eps);
        double big = 0.0;
        for (std::uint64_t j = 0; j < n; ++j) big += eps / rng.uniform_pos();
        return big - z * h * std::log(1.0 / eps) + std::sqrt(z * h * eps) * rng.normal();
      }
      case JumpKind::Table: {
        if (q > 0.0 && rng.uniform() < -std::expm1(-q * z * h)) return kInf;
        const auto n = table.mass > 0.0 ? rng.poisson(z * h * table.mass) : 0;
        double big = 0.0;
        for (std::uint64_t j = 0; j < n; ++j) big += table.sample(rng);
        return big - z * h * table.comp_mean + std::sqrt(z * h * table.small_var) * rng.normal();
      }
    }
    return 0.0;
  }

  double immigration(double h, Rng& rng) const {
    double s = d * h;
    if (imm_stable) {
      const auto n = rng.poisson(imm_rate * h);
      for (std::uint64_t j = 0; j < n; ++j) s += eps * std::pow(rng.uniform_pos(), -1.0 / ib);
      s += imm_small_mean * h;
    }
    if (imm_table) {
      const auto n = itable.mass > 0.0 ? rng.poisson(itable.mass * h) : 0;
      for (std::uint64_t j = 0; j < n; ++j) s += itable.sample(rng);
      s += itable.small_mean * h;
    }
    return s;
  }
};

Engine make_engine(const Mechanism& mech, double sigma, double eps) {
  Engine e;
  e.sigma = sigma;
  e.eps = eps;
  e.alpha = sde_drift(mech);
  if (const auto* f = std::get_if<Feller>(&mech)) {
    e.gamma2 = f->gamma2;
  } else if (const auto* s = std::get_if<Stable>(&mech)) {
    if (s->beta == 1.0) {
      e.gamma2 = s->c;
    } else {
      e.beta = s->beta;
      e.C = stable_jump_constant(s->beta, s->c);
      e.kind = s->beta > 0.0 ? JumpKind::StablePos : JumpKind::StableNeg;
    }
  } else if (std::holds_alternative<Neveu>(mech)) {
    e.kind = JumpKind::Neveu;
  } else {
    const auto& g = std::get<GeneralCB>(mech);
    e.gamma2 = g.gamma2;
    e.q = g.q;
    e.kind = JumpKind::Table;
    e.table = TableSampler(g.mu, eps);
  }
  return e;
}

void add_immigration(Engine& e, const ImmigrationMechanism& imm) {
  e.d = imm.d;
  if (imm.stable && imm.stable->kappa > 0.0) {
    e.imm_stable = true;
    e.ib = imm.stable->beta;
    e.ik = imm.stable->kappa;
    const double g = std::tgamma(1.0 - e.ib);
    e.imm_rate = e.ik * std::pow(e.eps, -e.ib) / g;
    e.imm_small_mean = e.ik * e.ib / g * std::pow(e.eps, 1.0 - e.ib) / (1.0 - e.ib);
  }
  if (imm.table) {
    e.imm_table = true;
    e.itable = TableSampler(*imm.table, e.eps);
  }
}

SimPath run(const Engine& eng, bool with_imm, double z0, double T, const SimConfig& cfg, std::uint64_t path_id) {
  validate(cfg, z0);
  require(T > 0.0, ErrorKind::Parameter, "horizon must be positive");
  const std::size_t N = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / cfg.dt - 1e-9)));
  const double h = T / static_cast<double>(N);
  const double s = eng.sigma;
  EnvPath env = sample_env_path(s, -0.5 * s * s, T, N, cfg.seed, path_id, PathFlavor::K);
  Rng rd(cfg.seed, path_id, Stream::Demographic);
  Rng rj(cfg.seed, path_id, Stream::Jumps);
  Rng ri(cfg.seed, path_id, Stream::Immigration);

  SimPath out;
  std::vector<std::size_t> snap_idx;
  for (double rt : cfg.record_times) {
    require(rt >= 0.0 && rt <= T * (1.0 + 1e-12), ErrorKind::Parameter, "record time outside [0,T]");
    snap_idx.push_back(std::min(N, static_cast<std::size_t>(std::llround(rt / h))));
  }
  out.snapshots.assign(snap_idx.size(), 0.0);
  out.env_snapshots.resize(snap_idx.size());
  for (std::size_t j = 0; j < snap_idx.size(); ++j) out.env_snapshots[j] = env.values[snap_idx[j]];
  auto snap = [&](std::size_t i, double z) {
    for (std::size_t j = 0; j < snap_idx.size(); ++j)
      if (snap_idx[j] == i) out.snapshots[j] = z;
  };
  auto fill_rest = [&](std::size_t from, double z) {
    for (std::size_t j = 0; j < snap_idx.size(); ++j)
      if (snap_idx[j] >= from) out.snapshots[j] = z;
  };
  if (cfg.record_full) {
    out.t.reserve(N + 1);
    out.z.reserve(N + 1);
    out.t.push_back(0.0);
    out.z.push_back(z0);
  }

  const bool absorbing = !with_imm;
  double z = z0;
  if (absorbing && z < cfg.eps_abs) {
    z = 0.0;
    out.T0 = 0.0;
  }
  snap(0, z);
  std::size_t i = 0;
  for (; i < N; ++i) {
    if (absorbing && z == 0.0) break;
    if (z > cfg.stop_above) {
      out.stopped_high = true;
      break;
    }
    const double dK = env.values[i + 1] - env.values[i];
    const double zp = std::max(z, 0.0);
    const double demo = eng.gamma2 > 0.0 ? std::sqrt(2.0 * eng.gamma2 * zp * h) * rd.normal() : 0.0;
    const double jump = eng.jumps(zp, h, rj);
    const double imm = with_imm ? eng.immigration(h, ri) : 0.0;
    double zn;
    if (cfg.scheme == Scheme::LogSplit) {
      zn = std::exp(eng.alpha * h + dK) * (zp + demo + jump) + imm;
    } else {
      zn = zp + eng.alpha * zp * h + zp * (dK + 0.5 * s * s * h) + demo + jump + imm;
    }
    if (!(zn < cfg.m_expl)) {  // also catches NaN from an infinite jump
      z = kInf;
      out.Tinf = h * static_cast<double>(i + 1);
      ++i;
      break;
    }
    z = std::max(zn, 0.0);
    if (absorbing && z < cfg.eps_abs) {
      z = 0.0;
      out.T0 = h * static_cast<double>(i + 1);
    }
    if (cfg.record_full) {
      out.t.push_back(h * static_cast<double>(i + 1));
      out.z.push_back(z);
    }
    snap(i + 1, z);
  }
  // Absorbed or exploded states are frozen; an early high stop leaves the last value in place.
  if (i < N) fill_rest(i + 1, z);
  if (cfg.record_full && i < N && !out.stopped_high) {
    for (std::size_t j = i + 1; j <= N; ++j) {
      out.t.push_back(h * static_cast<double>(j));
      out.z.push_back(z);
    }
  }
  out.z_final = z;
  out.t_final = out.stopped_high ? h * static_cast<double>(i) : T;
  out.k_final = env.values.back();
  if (cfg.record_full) out.env = std::move(env);
  return out;
}

}  // namespace

const char* to_string(Scheme s) { return s == Scheme::LogSplit ? "log_split" : "euler_full_truncation"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "euler_full_truncation" || s == "euler") return Scheme::Euler;
  if (s == "log_split") return Scheme::LogSplit;
  throw Error(ErrorKind::Parameter, "unknown scheme '" + s + "'");
}

void validate(const SimConfig& cfg, double z0) {
  require(cfg.dt > 0.0 && std::isfinite(cfg.dt), ErrorKind::Parameter, "dt must be positive");
  require(cfg.eps_jump > 0.0 && cfg.eps_jump < 1.0, ErrorKind::Parameter, "eps_jump must lie in (0,1)");
  require(cfg.eps_abs > 0.0, ErrorKind::Parameter, "eps_abs must be positive");
  require(z0 >= 0.0 && std::isfinite(z0), ErrorKind::Parameter, "initial mass must be finite and nonnegative");
  require(cfg.m_expl > z0, ErrorKind::Parameter, "explosion threshold must exceed the initial mass");
}

double stable_jump_constant(double beta, double c) {
  require(beta > -1.0 && beta < 1.0 && beta != 0.0, ErrorKind::Parameter, "stable jumps need beta in (-1,0) U (0,1)");
  return c * beta * (beta + 1.0) / std::tgamma(1.0 - beta);
}

double simulate_stable_jumps(double z, double dt, double beta, double c, double eps_jump, Rng& rng) {
  Engine e;
  e.eps = eps_jump;
  e.beta = beta;
  e.C = stable_jump_constant(beta, c);
  e.kind = beta > 0.0 ? JumpKind::StablePos : JumpKind::StableNeg;
  return e.jumps(z, dt, rng);
}

SimPath simulate_cbbre(const Mechanism& mech, double sigma, double z0, double T, const SimConfig& cfg,
                       std::uint64_t path_id) {
  validate(mech);
  require(sigma >= 0.0, ErrorKind::Parameter, "sigma must be nonnegative");
  return run(make_engine(mech, sigma, cfg.eps_jump), false, z0, T, cfg, path_id);
}

SimPath simulate_cbibre(const Mechanism& mech, const ImmigrationMechanism& imm, double sigma, double z0, double T,
                        const SimConfig& cfg, std::uint64_t path_id) {
  validate(mech);
  validate(imm);
  require(sigma >= 0.0, ErrorKind::Parameter, "sigma must be nonnegative");
  require(!infinite_mean(mech), ErrorKind::Unsupported, "immigration needs a finite-mean mechanism");
  Engine e = make_engine(mech, sigma, cfg.eps_jump);
  add_immigration(e, imm);
  return run(e, !imm.none(), z0, T, cfg, path_id);
}

Events detect_events(const std::vector<double>& t, const std::vector<double>& z, double eps_abs, double m_expl) {
  require(t.size() == z.size(), ErrorKind::Parameter, "time and state arrays differ in length");
  Events ev;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < eps_abs) {
      ev.T0 = t[i];
      return ev;
    }
    if (!(z[i] <= m_expl)) {
      ev.Tinf = t[i];
      return ev;
    }
  }
  return ev;
}

MartingaleReport martingale_diagnostics(const std::vector<SimPath>& paths, double z0, double alpha, int bins) {
  MartingaleReport rep;
  rep.n = paths.size();
  require(rep.n >= 2, ErrorKind::Parameter, "need at least two paths");
  std::vector<double> scaled(rep.n), k0(rep.n), zt(rep.n), w0(rep.n);
  for (std::size_t i = 0; i < rep.n; ++i) {
    const auto& p = paths[i];
    k0[i] = p.k_final + alpha * p.t_final;
    zt[i] = p.z_final;
    scaled[i] = std::isfinite(p.z_final) ? p.z_final * std::exp(-k0[i]) : 0.0;
    w0[i] = p.T0 ? 1.0 : 0.0;
  }
  const MeanSE ms = mean_se(scaled);
  rep.mean_scaled = ms.mean;
  rep.se_scaled = ms.se;
  rep.supermartingale_ok = ms.mean <= z0 + 3.0 * ms.se + 1e-12;
  const MeanSE mw = mean_se(w0);
  rep.p_w0 = mw.mean;
  rep.se_p_w0 = mw.se;

  std::vector<std::size_t> idx(rep.n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return k0[a] < k0[b]; });
  const std::size_t nb = std::max<std::size_t>(2, std::min<std::size_t>(bins, rep.n / 2));
  std::vector<double> obs, pred;
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * rep.n / nb, hi = (b + 1) * rep.n / nb;
    double so = 0.0, sp = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      so += zt[idx[j]];
      sp += z0 * std::exp(k0[idx[j]]);
    }
    obs.push_back(so / static_cast<double>(hi - lo));
    pred.push_back(sp / static_cast<double>(hi - lo));
  }
  const double mo = std::accumulate(obs.begin(), obs.end(), 0.0) / static_cast<double>(obs.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t b = 0; b < obs.size(); ++b) {
    ss_res += (obs[b] - pred[b]) * (obs[b] - pred[b]);
    ss_tot += (obs[b] - mo) * (obs[b] - mo);
  }
  rep.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return rep;
}

std::string sim_path_csv(const SimPath& path) {
  std::ostringstream os;
  os << "t,Z,K\n";
  char buf[96];
  for (std::size_t i = 0; i < path.t.size(); ++i) {
    const double k = path.env.t.empty() ? std::nan("") : path.env.at(path.t[i]);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", path.t[i], path.z[i], k);
    os << buf;
  }
  return os.str();
}

EnvPath to_k0(const EnvPath& k, double alpha) {
  EnvPath out = k;
  for (std::size_t i = 0; i < out.t.size(); ++i) out.values[i] += alpha * out.t[i];
  out.flavor = PathFlavor::K0;
  out.drift = k.drift + alpha;
  return out;
}

}  // namespace cbbre
