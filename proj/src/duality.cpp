#include "lcsbp/duality.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace lcsbp {

namespace {

std::uint64_t side_seed(std::uint64_t seed, std::uint64_t side, double start) {
  return derive_seed(derive_seed(seed, side), std::bit_cast<std::uint64_t>(start));
}

void check_inputs(const MechanismSpec& spec, double z0, double x0, double t, ZInfinity regime) {
  if (!(z0 >= 0) || !(x0 >= 0) || !std::isfinite(x0)) throw std::invalid_argument("need z0 >= 0 and finite x0 >= 0");
  if (!(t > 0) || !std::isfinite(t)) throw std::invalid_argument("t must be positive and finite");
  if (regime == ZInfinity::inconclusive) throw PreconditionError("regime at infinity is inconclusive");
  double p = 2 * spec.lambda / spec.c;
  if (regime == ZInfinity::exit) {
    if (std::isinf(z0)) throw PreconditionError("z0 = inf is not a starting point when infinity is an exit");
    if (x0 == 0) throw PreconditionError("the exit regime needs x0 > 0");
    if (p < 1) throw PreconditionError("exit regime with 2 lambda / c < 1");
  } else if (regime == ZInfinity::regular_reflecting && p >= 1) {
    throw PreconditionError("reflecting regime with 2 lambda / c >= 1");
  }
}

SimConfig side_config(const DualityConfig& cfg, std::vector<double> times, std::uint64_t seed) {
  SimConfig s = cfg.sim;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  s.grid = times;
  s.t_max = times.back();
  s.levels.clear();
  s.seed = seed;
  return s;
}

std::vector<PathRecord> z_paths(const MechanismSpec& spec, ZInfinity regime, double z0, const SimConfig& s,
                                const DualityConfig& cfg) {
  if (regime == ZInfinity::regular_reflecting) return simulate_zk(spec, cfg.k_reflect, z0, s);
  return simulate_zmin(spec, z0, s);
}

std::vector<PathRecord> u_paths(const MechanismSpec& spec, ZInfinity regime, double x0, const SimConfig& s) {
  return simulate_u(spec, x0, regime == ZInfinity::exit ? UMode::entrance : UMode::absorb_at_zero, s);
}

// Z side for one starting point; z0 = inf runs every proxy.
struct ZBatch {
  std::vector<std::vector<PathRecord>> runs;  // one per proxy, or a single run
  std::vector<double> starts;
};

ZBatch z_batch(const MechanismSpec& spec, ZInfinity regime, double z0, const std::vector<double>& times,
               const DualityConfig& cfg) {
  ZBatch b;
  if (std::isinf(z0)) {
    if (cfg.inf_proxies.empty()) throw std::invalid_argument("no proxies for z0 = inf");
    b.starts = cfg.inf_proxies;
  } else {
    b.starts = {z0};
  }
  for (double s : b.starts) b.runs.push_back(z_paths(spec, regime, s, side_config(cfg, times, side_seed(cfg.sim.seed, 1, s)), cfg));
  return b;
}

void finish(DualityCheck& c, double rule) {
  double se = std::hypot(c.lhs.se, c.rhs.se);
  double diff = std::fabs(c.lhs.mean - c.rhs.mean);
  c.discrepancy = se > 0 ? diff / se : (diff == 0 ? 0.0 : kInf);
  c.pass = c.stable && c.discrepancy <= rule;
}

DualityCheck assemble(const ZBatch& zb, const std::vector<PathRecord>& up, double z0, double x0, double t,
                      double rule) {
  DualityCheck c;
  c.z0 = z0, c.x0 = x0, c.t = t;
  std::vector<Estimate> est;
  for (auto& run : zb.runs) est.push_back(mc_laplace(run, x0, t));
  c.lhs = est.back();
  for (size_t i = 0; i + 1 < est.size(); ++i) {
    double se = std::hypot(est[i].se, c.lhs.se);
    if (std::fabs(est[i].mean - c.lhs.mean) > rule * se && !(se == 0 && est[i].mean == c.lhs.mean)) c.stable = false;
  }
  if (!c.stable) c.note = "start-at-infinity proxies disagree";
  c.rhs = mc_laplace(up, z0, t);
  finish(c, rule);
  return c;
}

DualityCheck trivial(double z0, double x0, double t, const char* note) {
  DualityCheck c;
  c.z0 = z0, c.x0 = x0, c.t = t;
  c.lhs = {1.0, 0.0, 0};
  c.rhs = {1.0, 0.0, 0};
  c.pass = true;
  c.note = note;
  return c;
}

}  // namespace

double generator_duality_residual(const MechanismSpec& spec, double z, double x) {
  if (z == 0) return 0.0;
  const double e = std::exp(-x * z);
  // generator of Z on z -> e^{-xz}, term by term
  double branching = -spec.lambda + 0.5 * spec.sigma * spec.sigma * x * x + spec.gamma * x + spec.levy.levy_integral(x);
  double lhs = z * e * branching + 0.5 * spec.c * x * z * z * e;
  // A on x -> e^{-zx}: f' = -z e, f'' = z^2 e
  double rhs = 0.5 * spec.c * x * (z * z * e) - eval_psi(spec, x) * (-z * e);
  return std::fabs(lhs - rhs);
}

DualityCheck run_duality_check(const MechanismSpec& spec, double z0, double x0, double t, ZInfinity regime,
                               const DualityConfig& cfg) {
  check_inputs(spec, z0, x0, t, regime);
  if (x0 == 0) return trivial(z0, x0, t, "x0 = 0");
  if (z0 == 0) return trivial(z0, x0, t, "z0 = 0");
  ZBatch zb = z_batch(spec, regime, z0, {t}, cfg);
  auto up = u_paths(spec, regime, x0, side_config(cfg, {t}, side_seed(cfg.sim.seed, 2, x0)));
  return assemble(zb, up, z0, x0, t, cfg.sigma_rule);
}

std::vector<SuiteSpec> golden_suite_specs() {
  MechanismSpec feller;
  feller.sigma = 1.0;
  feller.gamma = -0.5;
  feller.c = 1.0;
  MechanismSpec reflecting;
  reflecting.lambda = 1.0;
  reflecting.c = 4.0;
  MechanismSpec exit;
  exit.lambda = 1.0;
  exit.c = 1.0;
  return {{"stable-1.5", stable_mechanism(1.5, 1.0)},
          {"feller-logistic", feller},
          {"killing-reflecting", reflecting},
          {"killing-exit", exit}};
}

std::vector<DualityPoint> default_duality_grid() {
  std::vector<DualityPoint> g;
  for (double z : {0.5, 1.0, 2.0})
    for (double x : {0.5, 1.0, 2.0})
      for (double t : {0.5, 1.0, 2.0}) g.push_back({z, x, t});
  return g;
}

SuiteReport run_suite(const std::vector<SuiteSpec>& specs, const std::vector<DualityPoint>& grid,
                      const DualityConfig& cfg) {
  SuiteReport rep;
  for (const auto& entry : specs) {
    SpecSuiteResult res;
    res.name = entry.name;
    if (grid.empty()) {
      rep.specs.push_back(res);
      continue;
    }
    res.regime = classify_all(entry.spec).z_at_infinity;
    for (auto& p : grid) check_inputs(entry.spec, p.z0, p.x0, p.t, res.regime);

    std::vector<double> times;
    std::set<double> zs, xs;
    for (auto& p : grid) {
      times.push_back(p.t);
      if (p.z0 > 0) zs.insert(p.z0);
      if (p.x0 > 0) xs.insert(p.x0);
    }
    std::map<double, ZBatch> zb;
    for (double z : zs) zb.emplace(z, z_batch(entry.spec, res.regime, z, times, cfg));
    std::map<double, std::vector<PathRecord>> ub;
    for (double x : xs)
      ub.emplace(x, u_paths(entry.spec, res.regime, x, side_config(cfg, times, side_seed(cfg.sim.seed, 2, x))));

    std::map<std::string, int> fails;
    for (auto& p : grid) {
      DualityCheck c;
      if (p.x0 == 0)
        c = trivial(p.z0, p.x0, p.t, "x0 = 0");
      else if (p.z0 == 0)
        c = trivial(p.z0, p.x0, p.t, "z0 = 0");
      else
        c = assemble(zb.at(p.z0), ub.at(p.x0), p.z0, p.x0, p.t, cfg.sigma_rule);
      if (c.pass) {
        ++res.passed;
      } else {
        std::ostringstream a, b;
        a << "z0=" << p.z0;
        b << "x0=" << p.x0;
        ++fails[a.str()];
        ++fails[b.str()];
      }
      res.checks.push_back(c);
    }
    for (auto& [batch, n] : fails)
      if (n >= 2) res.clusters.push_back(batch + " (" + std::to_string(n) + " failures)");

    // same paths across x0 (resp. z0), so these hold path by path
    for (auto& a : res.checks)
      for (auto& b : res.checks) {
        if (a.z0 == b.z0 && a.t == b.t && a.x0 < b.x0 && b.lhs.mean > a.lhs.mean + 1e-12) res.lhs_monotone = false;
        if (a.x0 == b.x0 && a.t == b.t && a.z0 < b.z0 && b.rhs.mean > a.rhs.mean + 1e-12) res.rhs_monotone = false;
      }
    rep.total += res.checks.size();
    rep.passed += res.passed;
    rep.specs.push_back(std::move(res));
  }
  rep.expected_failures = rep.total * std::erfc(cfg.sigma_rule / std::sqrt(2.0));
  return rep;
}

}  // namespace lcsbp
