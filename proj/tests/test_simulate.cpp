#include <cmath>

#include "doctest.h"
#include "lcsbp/simulate.hpp"

using namespace lcsbp;

TEST_CASE("Psi = 0 gives the logistic curve") {
  for (double c : {1.0, 2.0}) {
    MechanismSpec s;
    s.c = c;
    SimConfig cfg;
    cfg.n_paths = 2;
    cfg.t_max = 5.0;
    for (int i = 0; i <= 50; ++i) cfg.grid.push_back(0.1 * i);
    auto p = simulate_zmin(s, 2.0, cfg);
    for (auto& path : p)
      for (size_t i = 0; i < path.times.size(); ++i)
        CHECK(path.values[i] == doctest::Approx(1.0 / (0.5 + 0.5 * c * path.times[i])).epsilon(1e-12));
  }
}

TEST_CASE("time change: clock is the integral of Z") {
  MechanismSpec s;  // deterministic, Z_t = 1 / (1 + t)
  s.c = 2.0;
  SimConfig cfg;
  cfg.n_paths = 1;
  cfg.t_max = 3.0;
  cfg.grid = {1.0, 3.0};
  auto p = simulate_zmin(s, 1.0, cfg);
  REQUIRE(p[0].clock.size() == 2);
  CHECK(p[0].clock[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(p[0].clock[1] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("seeded runs are reproducible across worker counts") {
  MechanismSpec s;
  s.sigma = 1.0;
  s.gamma = -0.5;
  SimConfig cfg;
  cfg.n_paths = 200;
  cfg.t_max = 1.0;
  cfg.grid = {0.5, 1.0};
  cfg.seed = 42;
  cfg.workers = 1;
  auto a = simulate_zmin(s, 1.0, cfg);
  cfg.workers = 3;
  auto b = simulate_zmin(s, 1.0, cfg);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
  cfg.seed = 43;
  auto c = simulate_zmin(s, 1.0, cfg);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs |= a[i].values != c[i].values;
  CHECK(differs);
}

TEST_CASE("U with Psi = 0 is absorbed with probability exp(-2 x0 / (c t))") {
  MechanismSpec s;
  s.c = 1.0;
  SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.t_max = 1.0;
  cfg.grid = {1.0};
  cfg.seed = 5;
  auto p = simulate_u(s, 1.0, UMode::absorb_at_zero, cfg);
  Estimate e = mc_laplace(p, INFINITY, 1.0);
  CHECK(std::fabs(e.mean - std::exp(-2.0)) < 4 * e.se);
  // martingale: E U_1 = x0
  Estimate m = mc_mean(p, [](const PathRecord& r) { return r.values[0]; });
  CHECK(std::fabs(m.mean - 1.0) < 4 * m.se);
}

TEST_CASE("killing sends Z to infinity") {
  MechanismSpec s;
  s.lambda = 1.0;
  s.gamma = 1.0;
  s.c = 2.0;
  SimConfig cfg;
  cfg.n_paths = 4000;
  cfg.t_max = INFINITY;
  cfg.seed = 9;
  auto p = simulate_zmin(s, 1.0, cfg);
  Estimate e = mc_mean(p, [](const PathRecord& r) { return r.absorbed_at == Absorption::infinity ? 1.0 : 0.0; });
  // R reaches 0 at R-time log 2 unless killed first
  CHECK(std::fabs(e.mean - 0.5) < 4 * e.se);
}

TEST_CASE("value_at and mc_laplace conventions") {
  PathRecord p;
  p.times = {0.5, 1.0};
  p.values = {2.0, INFINITY};
  CHECK(value_at(p, 0.5) == 2.0);
  CHECK(value_at(p, 0.7) == 2.0);
  CHECK_THROWS(value_at(p, 1.5));
  std::vector<PathRecord> v{p};
  CHECK(mc_laplace(v, 1.0, 1.0).mean == 0.0);
  CHECK(mc_laplace(v, 0.0, 1.0).mean == 1.0);
  CHECK(mc_laplace(v, 1.0, 0.5).mean == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("first passage levels are recorded in the own clock") {
  MechanismSpec s;  // R_s = -1 + 3 e^{-s} for c = 2, gamma = 1
  s.gamma = 1.0;
  s.c = 2.0;
  SimConfig cfg;
  cfg.n_paths = 1;
  cfg.t_max = 5.0;
  cfg.levels = {1.0};
  auto p = simulate_ou(s, 2.0, cfg);
  REQUIRE(p[0].first_passage.at(1.0).has_value());
  CHECK(*p[0].first_passage.at(1.0) == doctest::Approx(std::log(1.5)).epsilon(1e-9));
}

TEST_CASE("config validation") {
  MechanismSpec s;
  SimConfig cfg;
  cfg.t_max = INFINITY;
  CHECK_THROWS(simulate_ou(s, 1.0, cfg));
  CHECK_THROWS(simulate_zk(s, 0.0, 1.0, SimConfig{}));
  MechanismSpec k;
  k.lambda = 0.1;
  k.c = 2.0;
  CHECK_THROWS(simulate_u(k, 1.0, UMode::entrance, SimConfig{}));
}
