#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lcsbp/classify.hpp"

// Classification goldens with the verdicts stated for each example.
struct Golden {
  std::string name;
  lcsbp::MechanismSpec spec;
  lcsbp::ZInfinity at_infinity;
};

inline std::vector<Golden> classification_goldens() {
  using namespace lcsbp;
  std::vector<Golden> g;
  for (double a : {0.5, 1.5, 2.0})
    g.push_back({"stable alpha=" + std::to_string(a), stable_mechanism(a, 1.0), ZInfinity::entrance});
  for (auto [lam, c, v] : {std::tuple{0.5, 2.0, ZInfinity::regular_reflecting}, {1.0, 4.0, ZInfinity::regular_reflecting},
                           {1.0, 2.0, ZInfinity::exit}, {2.0, 2.0, ZInfinity::exit}}) {
    MechanismSpec s;
    s.lambda = lam;
    s.c = c;
    g.push_back({"killing 2l/c=" + std::to_string(2 * lam / c), s, v});
  }
  struct E3 {
    const char* name;
    double alpha, beta;
    ZInfinity v;
  };
  for (E3 e : {E3{"log tail i", 0.25, 1.0, ZInfinity::entrance}, E3{"log tail i at 2a/c = 1", 0.5, 1.0, ZInfinity::entrance}, E3{"log tail ii", 1.0, 1.0, ZInfinity::regular_reflecting},
               E3{"log tail iii", 0.5, 0.5, ZInfinity::regular_reflecting}}) {
    MechanismSpec s;
    s.sigma = 1.0;
    s.c = 1.0;
    s.levy = LevyMeasure::log_tail(e.alpha, e.beta);
    g.push_back({e.name, s, e.v});
  }
  return g;
}
