#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "doctest.h"
#include "lcsbp/formulas.hpp"

using namespace lcsbp;

TEST_CASE("OU Laplace transform with killing only") {
  MechanismSpec s;
  s.lambda = 0.5;
  s.c = 1.0;
  // R_s = z0 e^{-cs/2} until an Exp(lambda) killing
  for (auto [z0, th, t] : {std::tuple{1.0, 1.0, 1.0}, {2.0, 0.5, 3.0}, {0.3, 4.0, 0.2}}) {
    double oracle = std::exp(-th * z0 * std::exp(-0.5 * s.c * t) - s.lambda * t);
    CHECK(ou_laplace(s, z0, th, t).value == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("hitting transform matches the deterministic flow") {
  // Psi(z) = z: dR = (-1 - (c/2) R) ds, so R_s = -m + (z0 + m) e^{-cs/2}, m = 2/c
  for (double c : {1.0, 2.0, 3.0}) {
    MechanismSpec s;
    s.gamma = 1.0;
    s.c = c;
    const double m = 2.0 / c;
    for (auto [z0, a, mu] : {std::tuple{2.0, 0.5, 0.5}, {3.0, 1.0, 1.0}, {1.0, 0.0, 2.0}}) {
      double sigma = (2.0 / c) * std::log((z0 + m) / (a + m));
      auto v = hitting_laplace(s, z0, a, mu);
      CHECK(v.value == doctest::Approx(std::exp(-mu * sigma)).epsilon(1e-8));
      CHECK(v.error < 1e-6);
      CHECK(progeny_laplace(s, z0, a, mu).value == v.value);
    }
  }
}

TEST_CASE("hitting preconditions") {
  MechanismSpec sub;
  sub.lambda = 1.0;
  CHECK_THROWS_AS(hitting_laplace(sub, 2.0, 1.0, 1.0), PreconditionError);
  MechanismSpec s;
  s.gamma = 1.0;
  CHECK_THROWS_AS(hitting_laplace(s, 0.5, 1.0, 1.0), std::invalid_argument);
  CHECK(hitting_laplace(s, 1.0, 1.0, 1.0).value == 1.0);
}

TEST_CASE("extinction probability for Psi = z - lambda") {
  // zero is reached at R-time log(1 + z0) (c = 2) unless killed first
  for (double lam : {1.0, 1.5, 3.0}) {
    MechanismSpec s;
    s.gamma = 1.0;
    s.lambda = lam;
    s.c = 2.0;
    for (double z0 : {0.5, 1.0, 4.0})
      CHECK(extinction_prob(s, z0).value == doctest::Approx(std::pow(1 + z0, -lam)).epsilon(1e-8));
  }
}

TEST_CASE("stationary law and exit probability against the incomplete gamma function") {
  MechanismSpec s;
  s.lambda = 0.5;
  s.gamma = -1.0;  // delta = 1
  s.c = 2.0;
  const double p = 2 * s.lambda / s.c, b = 2 * 1.0 / s.c;
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    double oracle = boost::math::gamma_q(1 - p, b * x);
    CHECK(stationary_laplace(s, x).value == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(exit_prob_u(s, x).value == doctest::Approx(oracle).epsilon(1e-8));
  }
  CHECK(stationary_laplace(s, 0.0).value == 1.0);

  MechanismSpec pure;  // delta = 0 with finite jump mass: condition (A)
  pure.lambda = 0.2;
  pure.c = 2.0;
  auto d = stationary_laplace(pure, 1.0);
  CHECK(d.degenerate);
  CHECK(d.value == 1.0);

  MechanismSpec sq;
  sq.sigma = 1.0;
  CHECK_THROWS_AS(stationary_laplace(sq, 1.0), PreconditionError);
  CHECK(exit_prob_u(sq, 1.0).value == 1.0);
}

TEST_CASE("cumulant ODE closed forms") {
  MechanismSpec sq;
  sq.sigma = std::sqrt(2.0);  // Psi = u^2
  CHECK(cumulant_ode(sq, 2.0, 1.5).value == doctest::Approx(2.0 / (1 + 2.0 * 1.5)).epsilon(1e-8));
  MechanismSpec lin;
  lin.gamma = 1.0;
  CHECK(cumulant_ode(lin, 3.0, 2.0).value == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-8));
  MechanismSpec kill;
  kill.lambda = 0.7;
  CHECK(cumulant_ode(kill, 1.0, 2.0).value == doctest::Approx(1.0 + 1.4).epsilon(1e-9));
  MechanismSpec neg;
  neg.gamma = -1.0;  // u' = u
  CHECK(cumulant_ode(neg, 1.0, 1.0).value == doctest::Approx(std::exp(1.0)).epsilon(1e-8));
  CHECK(std::isinf(cumulant_ode(neg, 1.0, 40.0).value));
}

TEST_CASE("shared Q tables are reused") {
  MechanismSpec s;
  s.sigma = 1.0;
  auto a = shared_qtable(s);
  auto b = shared_qtable(s);
  CHECK(a.get() == b.get());
}
