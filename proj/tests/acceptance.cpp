// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "goldens.hpp"
#include "lcsbp/duality.hpp"
#include "lcsbp/formulas.hpp"
#include "lcsbp/simulate.hpp"
#include "property_checks.hpp"

using namespace lcsbp;

namespace {

constexpr std::size_t kPaths = 100000;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
};

// |mc - oracle| within 3 combined SEs; the formula's own error estimate counts as one.
bool within(const Estimate& e, const FormulaValue& f, Outcome& o, const char* label) {
  double se = std::hypot(e.se, f.error);
  double z = se > 0 ? (e.mean - f.value) / se : (e.mean == f.value ? 0.0 : INFINITY);
  o.detail << label << " z=" << std::round(z * 100) / 100 << "; ";
  bool ok = std::fabs(z) <= 3.0;
  o.ok = o.ok && ok;
  return ok;
}

MechanismSpec feller_logistic() {
  MechanismSpec s;
  s.sigma = 1.0;
  s.gamma = -0.5;
  s.c = 1.0;
  return s;
}

void c1(Outcome& o) {
  int wrong = 0, inconclusive = 0;
  for (auto& g : classification_goldens()) {
    auto r = classify_all(g.spec);
    if (r.any_inconclusive()) ++inconclusive;
    if (r.z_at_infinity != g.at_infinity) {
      ++wrong;
      o.detail << g.name << " gave " << to_string(r.z_at_infinity) << "; ";
    }
  }
  MechanismSpec quad;
  quad.sigma = std::sqrt(2.0);
  MechanismSpec lin;
  lin.gamma = 1.0;
  auto rq = classify_all(quad).z_at_zero, rl = classify_all(lin).z_at_zero;
  if (rq != ZZero::exit) ++wrong, o.detail << "z^2 gave " << to_string(rq) << "; ";
  if (rl != ZZero::natural) ++wrong, o.detail << "z gave " << to_string(rl) << "; ";
  o.ok = wrong == 0 && inconclusive == 0;
  o.detail << classification_goldens().size() + 2 << " goldens, " << wrong << " wrong, " << inconclusive << " inconclusive";
}

void c2(Outcome& o) {
  int bad = 0;
  for (auto& g : classification_goldens()) {
    auto r = classify_all(g.spec);
    bool match = r.correspondence_ok && r.u_at_zero_feller == r.u_at_zero && r.u_at_infinity_feller == r.u_at_infinity;
    if (!match) {
      ++bad;
      o.detail << g.name << ": U(0) " << to_string(r.u_at_zero_feller) << " vs " << to_string(r.u_at_zero) << ", U(inf) "
               << to_string(r.u_at_infinity_feller) << " vs " << to_string(r.u_at_infinity) << "; ";
    }
  }
  o.ok = bad == 0;
  o.detail << bad << " mismatches";
}

void c3(Outcome& o) {
  MechanismSpec s;
  s.c = 2.0;
  SimConfig cfg;
  cfg.n_paths = 1;
  cfg.t_max = 10.0;
  for (int i = 0; i <= 1000; ++i) cfg.grid.push_back(i * 0.01);
  auto p = simulate_zmin(s, 1.0, cfg);
  double err = 0;
  for (size_t i = 0; i < p[0].times.size(); ++i)
    err = std::max(err, std::fabs(p[0].values[i] - 1.0 / (1.0 + p[0].times[i])));
  o.ok = err < 1e-6;
  o.detail << "max error " << err;
}

void c4(Outcome& o) {
  MechanismSpec killing;
  killing.lambda = 0.5;
  killing.c = 1.0;
  const std::pair<double, double> pts[] = {{1.0, 1.0}, {2.0, 0.5}, {0.5, 1.0}, {1.0, 0.5}};
  for (auto& [name, s] : {std::pair{"killing", killing}, std::pair{"feller", feller_logistic()}}) {
    SimConfig cfg;
    cfg.n_paths = kPaths;
    cfg.t_max = 1.0;
    cfg.grid = {0.5, 1.0};
    cfg.stop_at_zero = false;
    cfg.seed = 4;
    auto p = simulate_ou(s, 1.0, cfg);
    for (auto [th, t] : pts) {
      std::string label = std::string(name) + "(" + std::to_string(th).substr(0, 3) + "," + std::to_string(t).substr(0, 3) + ")";
      within(mc_laplace(p, th, t), ou_laplace(s, 1.0, th, t), o, label.c_str());
    }
  }
}

void c5(Outcome& o) {
  MechanismSpec s = feller_logistic();
  SimConfig cfg;
  cfg.n_paths = kPaths;
  cfg.seed = 5;
  cfg.t_max = 60.0;
  cfg.levels = {0.5, 1.0};
  auto ou = simulate_ou(s, 2.0, cfg);
  cfg.t_max = kInf;
  cfg.r_time_cap = 60.0;
  auto z = simulate_zmin(s, 2.0, cfg);
  for (auto [mu, a] : {std::pair{0.5, 0.5}, std::pair{1.0, 1.0}}) {
    auto f = hitting_laplace(s, 2.0, a, mu);
    auto e1 = mc_mean(ou, [&](const PathRecord& r) {
      auto v = r.first_passage.at(a);
      return v ? std::exp(-mu * *v) : 0.0;
    });
    auto e2 = mc_mean(z, [&](const PathRecord& r) {
      auto v = r.progeny.at(a);
      return v ? std::exp(-mu * *v) : 0.0;
    });
    std::string tag = "mu=" + std::to_string(mu).substr(0, 3) + " a=" + std::to_string(a).substr(0, 3);
    within(e1, f, o, ("passage " + tag).c_str());
    within(e2, f, o, ("progeny " + tag).c_str());
  }
}

void c6(Outcome& o) {
  DualityConfig cfg;
  cfg.sim.n_paths = kPaths;
  cfg.sim.seed = 1;
  cfg.sim.max_jump_rate = 1e3;
  auto rep = run_suite(golden_suite_specs(), default_duality_grid(), cfg);
  for (auto& s : rep.specs) o.detail << s.name << " " << s.passed << "/" << s.checks.size() << "; ";
  o.detail << "overall " << rep.passed << "/" << rep.total;
  o.ok = rep.pass_rate() >= 0.99;
}

void c7(Outcome& o) {
  MechanismSpec s;
  s.lambda = 0.5;
  s.gamma = -1.0;  // delta = 1
  s.c = 2.0;
  SimConfig cfg;
  cfg.n_paths = kPaths;
  cfg.seed = 7;
  cfg.t_max = 10.0;
  cfg.grid = {10.0};
  auto p = simulate_zk(s, 1e5, 2.0, cfg);
  for (double x : {0.5, 1.0, 2.0}) within(mc_laplace(p, x, 10.0), stationary_laplace(s, x), o, ("x=" + std::to_string(x).substr(0, 3)).c_str());
  double lo = INFINITY;
  for (auto& r : p) lo = std::min(lo, r.values[0]);
  const double floor = 2.0 * 1.0 / s.c;
  o.detail << "min sample " << lo << " vs 2delta/c=" << floor;
  o.ok = o.ok && lo >= floor - 1e-9;
}

void c8(Outcome& o) {
  MechanismSpec s;
  s.gamma = 1.0;
  s.lambda = 1.0;
  s.c = 2.0;
  SimConfig cfg;
  cfg.n_paths = kPaths;
  cfg.seed = 8;
  cfg.t_max = kInf;
  auto p = simulate_zmin(s, 1.0, cfg);
  auto e = mc_mean(p, [](const PathRecord& r) { return r.absorbed_at == Absorption::infinity ? 0.0 : 1.0; });
  within(e, extinction_prob(s, 1.0), o, "non-exploding fraction");
}

void c9(Outcome& o) {
  int failed = 0;
  for (auto& r : run_property_suite())
    if (!r.ok) ++failed, o.detail << r.name << " (" << r.detail << "); ";
  o.ok = failed == 0;
  o.detail << failed << " property failures";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> run;
  };
  const Criterion all[] = {
      {1, "classifier goldens", 10, c1},        {2, "Feller tests match correspondence", 30, c2},
      {3, "deterministic limit", 60, c3},       {4, "OU Laplace transform", 60, c4},
      {5, "hitting and total progeny", 300, c5}, {6, "duality suite", 900, c6},
      {7, "stationary law and support", 600, c7}, {8, "extinction probability", 600, c8},
      {9, "property suites", 300, c9},
  };
  int failures = 0;
  for (auto& c : all) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.budget_s;
    bool pass = o.ok && in_time;
    failures += !pass;
    std::printf("criterion %d %s: %s (%.1f s of %.0f s) %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs, c.budget_s,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures;
}
