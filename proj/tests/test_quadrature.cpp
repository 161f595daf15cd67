#include <cmath>

#include "doctest.h"
#include "lcsbp/quadrature.hpp"

using namespace lcsbp;

TEST_CASE("integrate with endpoint singularities and infinite ranges") {
  CHECK(integrate([](double x) { return 1 / std::sqrt(x); }, 0.0, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, INFINITY) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return std::log(x); }, 0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(integrate_gk([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("probe_improper verdicts") {
  auto conv = probe_improper([](double x) { return 1 / std::sqrt(x); }, SingularEnd::lower, 1.0);
  CHECK(conv.converges());
  CHECK(conv.value == doctest::Approx(2.0).epsilon(1e-7));

  auto div = probe_improper([](double x) { return 1 / x; }, SingularEnd::upper, 1.0);
  CHECK(div.diverges());

  auto div0 = probe_improper([](double x) { return 1 / (x * x); }, SingularEnd::lower, 1.0);
  CHECK(div0.diverges());

  auto tail = probe_improper([](double x) { return std::exp(-x); }, SingularEnd::upper, 1.0);
  CHECK(tail.converges());
  CHECK(tail.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-7));

  // cutoffs are dyadic multiples of the fixed end, so it must be positive
  auto bad = probe_improper([](double x) { return std::exp(-x); }, SingularEnd::upper, 0.0);
  CHECK(bad.inconclusive());
}
