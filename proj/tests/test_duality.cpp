#include <cmath>

#include "doctest.h"
#include "lcsbp/duality.hpp"

using namespace lcsbp;

TEST_CASE("generator duality residual") {
  MechanismSpec sq;
  sq.sigma = std::sqrt(2.0);
  sq.c = 1.5;
  CHECK(generator_duality_residual(sq, 0.0, 1.0) == 0.0);
  CHECK(generator_duality_residual(sq, 1.0, 1.0) < 1e-12);
  // L e_x(z) = Psi(x) z e^{-xz} + (c/2) x z^2 e^{-xz} = e^{-1} (1 + c/2) here
  double L = std::exp(-1.0) * (1 + sq.c / 2);
  CHECK(L == doctest::Approx(std::exp(-1.0) * 1.0 * 1.0 + 0.5 * sq.c * std::exp(-1.0)));
}

TEST_CASE("duality check conventions and preconditions") {
  MechanismSpec s;
  s.lambda = 1.0;
  s.c = 1.0;
  DualityConfig cfg;
  cfg.sim.n_paths = 100;
  CHECK_THROWS_AS(run_duality_check(s, 1.0, 0.0, 1.0, ZInfinity::exit, cfg), PreconditionError);
  CHECK_THROWS_AS(run_duality_check(s, INFINITY, 1.0, 1.0, ZInfinity::exit, cfg), PreconditionError);
  CHECK_THROWS_AS(run_duality_check(s, 1.0, 1.0, 1.0, ZInfinity::regular_reflecting, cfg), PreconditionError);
  CHECK_THROWS_AS(run_duality_check(s, 1.0, 1.0, 1.0, ZInfinity::inconclusive, cfg), PreconditionError);

  MechanismSpec f;
  f.sigma = 1.0;
  auto c = run_duality_check(f, 1.0, 0.0, 1.0, ZInfinity::entrance, cfg);
  CHECK(c.lhs.mean == 1.0);
  CHECK(c.rhs.mean == 1.0);
  CHECK(c.pass);
}

TEST_CASE("logistic Feller diffusion passes a small check") {
  MechanismSpec f;
  f.sigma = 1.0;
  f.gamma = -0.5;
  DualityConfig cfg;
  cfg.sim.n_paths = 20000;
  cfg.sim.seed = 3;
  auto c = run_duality_check(f, 1.0, 1.0, 1.0, ZInfinity::entrance, cfg);
  CHECK(c.lhs.mean >= 0);
  CHECK(c.lhs.mean <= 1);
  CHECK(c.pass);
}

TEST_CASE("start at infinity with killing, reflecting regime") {
  MechanismSpec s;
  s.lambda = 1.0;
  s.c = 4.0;
  DualityConfig cfg;
  cfg.sim.n_paths = 20000;
  cfg.sim.seed = 11;
  auto c = run_duality_check(s, INFINITY, 1.0, 1.0, ZInfinity::regular_reflecting, cfg);
  CHECK(c.stable);
  CHECK(c.pass);
}

TEST_CASE("suite bookkeeping") {
  DualityConfig cfg;
  auto empty = run_suite({{"f", MechanismSpec{}}}, {}, cfg);
  REQUIRE(empty.specs.size() == 1);
  CHECK(empty.specs[0].checks.empty());
  CHECK(empty.total == 0);

  MechanismSpec f;
  f.sigma = 1.0;
  cfg.sim.n_paths = 2000;
  cfg.sim.seed = 8;
  std::vector<DualityPoint> grid{{0.5, 0.5, 1.0}, {0.5, 2.0, 1.0}, {2.0, 0.5, 1.0}};
  auto a = run_suite({{"f", f}}, grid, cfg);
  auto b = run_suite({{"f", f}}, grid, cfg);
  REQUIRE(a.total == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(a.specs[0].checks[i].lhs.mean == b.specs[0].checks[i].lhs.mean);
  CHECK(a.specs[0].lhs_monotone);
  CHECK(a.specs[0].rhs_monotone);
  CHECK(default_duality_grid().size() == 27);
  CHECK(golden_suite_specs().size() == 4);
}
