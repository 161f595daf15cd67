#include <cmath>

#include "doctest.h"
#include "lcsbp/classify.hpp"

using namespace lcsbp;

TEST_CASE("Z to U boundary correspondence maps") {
  CHECK(u_zero_from(ZInfinity::entrance) == UZero::exit);
  CHECK(u_zero_from(ZInfinity::regular_reflecting) == UZero::regular_absorbing);
  CHECK(u_zero_from(ZInfinity::exit) == UZero::entrance);
  CHECK(u_infinity_from(ZZero::exit) == UInfinity::entrance);
  CHECK(u_infinity_from(ZZero::natural) == UInfinity::natural);
}

TEST_CASE("Grey test on the pure cases") {
  MechanismSpec sq;
  sq.sigma = std::sqrt(2.0);
  CHECK(test_grey(sq).converges());
  MechanismSpec lin;
  lin.gamma = 1.0;
  CHECK(test_grey(lin).diverges());
}

TEST_CASE("killing only: phase transition at 2 lambda / c = 1") {
  MechanismSpec s;
  s.c = 4.0;
  s.lambda = 1.0;
  auto r = classify_all(s);
  CHECK(r.z_at_infinity == ZInfinity::regular_reflecting);
  CHECK(r.u_at_zero == UZero::regular_absorbing);
  CHECK(r.correspondence_ok);
  s.c = 2.0;
  r = classify_all(s);
  CHECK(r.z_at_infinity == ZInfinity::exit);
  CHECK(r.u_at_zero_feller == UZero::entrance);
  CHECK_FALSE(r.any_inconclusive());
}

TEST_CASE("condition A") {
  MechanismSpec s;
  s.lambda = 0.5;
  s.gamma = -1.0;
  s.c = 2.0;
  auto a = check_condition_A(s);
  REQUIRE(a.has_value());
  CHECK_FALSE(*a);
  MechanismSpec sq;
  sq.sigma = 1;
  CHECK_FALSE(check_condition_A(sq).has_value());
}

TEST_CASE("E test is independent of theta") {
  MechanismSpec s;
  s.sigma = 1;
  s.c = 1;
  s.levy = LevyMeasure::log_tail(1.0, 1.0);
  auto base = test_E(s, 1.0).status;
  CHECK(base != VerdictStatus::inconclusive);
  for (double th : {0.25, 4.0}) CHECK(test_E(s, th).status == base);
}

TEST_CASE("log tail threshold at beta = 1 includes equality") {
  // entrance iff 2 alpha / c <= 1; sigma and gamma do not matter
  struct Case {
    double alpha, beta, c, gamma;
    ZInfinity expect;
  };
  for (Case k : {Case{0.5, 1.0, 1.0, 0.0, ZInfinity::entrance}, Case{1.0, 1.0, 2.0, -0.7, ZInfinity::entrance},
                 Case{0.6, 1.0, 1.0, 0.0, ZInfinity::regular_reflecting},
                 Case{0.1, 0.9, 1.0, 2.0, ZInfinity::regular_reflecting}, Case{3.0, 1.5, 1.0, 0.0, ZInfinity::entrance}}) {
    MechanismSpec s;
    s.sigma = 1.0;
    s.gamma = k.gamma;
    s.c = k.c;
    s.levy = LevyMeasure::log_tail(k.alpha, k.beta);
    auto r = classify_all(s);
    CAPTURE(k.alpha);
    CAPTURE(k.beta);
    CHECK(r.z_at_infinity == k.expect);
    CHECK_FALSE(r.any_inconclusive());
    CHECK(r.correspondence_ok);
  }
}
