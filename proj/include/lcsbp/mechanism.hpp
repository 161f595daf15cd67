#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "lcsbp/levy.hpp"

namespace lcsbp {

/// Branching mechanism data (lambda, sigma, gamma, pi) with competition c:
///   Psi(z) = -lambda + sigma^2 z^2 / 2 + gamma z + int (e^{-zx} - 1 + zx 1{x<=1}) pi(dx)
struct MechanismSpec {
  double lambda = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double c = 1.0;
  LevyMeasure levy;

  bool operator==(const MechanismSpec& o) const {
    return lambda == o.lambda && sigma == o.sigma && gamma == o.gamma && c == o.c && levy == o.levy;
  }
};

class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument on violated invariants.
void validate(const MechanismSpec& spec);

double eval_psi(const MechanismSpec& spec, double z);

/// Integral of Psi(u)/u over [a, b], 0 < a <= b.
double eval_psi_over_u_integral(const MechanismSpec& spec, double a, double b);

/// Psi_k: killing folded into an atom at k together with the jumps beyond k.
/// Psi_k decreases in k for k >= 1; for k < 1 the atom is compensated and it need not.
MechanismSpec truncate(const MechanismSpec& spec, double k);

struct DriftProbe {
  double delta = 0.0;        // structural value
  double probe = 0.0;        // -Psi(u)/u at the last probe point
  bool slow = false;         // probe had not settled to 1e-9
};

/// delta = -lim Psi(u)/u for subordinator duals; throws when not one.
double drift_delta(const MechanismSpec& spec);
DriftProbe drift_delta_diagnostics(const MechanismSpec& spec);

/// True iff Psi(z) < 0 for every z > 0. Throws InconclusiveError when the
/// structural and numeric decisions disagree.
bool is_subordinator_dual(const MechanismSpec& spec);

/// sup{z : Psi(z) <= 0}; +inf for subordinator duals.
double largest_root(const MechanismSpec& spec);

/// Psi(z) = (alpha-1) z^alpha for alpha in (0,1) u (1,2); alpha = 2 gives sigma^2 = 2.
MechanismSpec stable_mechanism(double alpha, double c);

}  // namespace lcsbp
