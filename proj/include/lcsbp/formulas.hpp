#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "lcsbp/mechanism.hpp"
#include "lcsbp/qtable.hpp"

namespace lcsbp {

/// Violated hypothesis of a formula (e.g. hitting transform of a subordinator dual).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FormulaValue {
  double value = 0.0;
  double error = 0.0;       // absolute error estimate
  bool degenerate = false;  // stationary law collapsed to 0
  std::string note;
};

/// Integrand x^{mu-1} exp(-z x - Q(x)), Q(x) = (2/c) int_theta^x Psi(y)/y dy.
struct WeightedIntegralSpec {
  double mu = 1.0;
  double z = 0.0;
  double theta = 1.0;
  MechanismSpec spec;
};

/// A positive integral kept in log form.
struct LogIntegral {
  double log_value = 0.0;
  double rel_error = 0.0;
  bool converged = true;
};

/// Per-spec Q table shared across callers; built once, safe for concurrent use.
std::shared_ptr<const QTable> shared_qtable(const MechanismSpec& spec);

LogIntegral weighted_integral(const WeightedIntegralSpec& w);

/// int_0^s Psi(theta e^{-c u/2}) du, computed as (2/c) int_{theta e^{-cs/2}}^theta Psi(v)/v dv.
double ou_laplace_exponent(const MechanismSpec& spec, double theta, double s);

/// E_z[exp(-theta R_s)] for the OU-type process started at z0.
FormulaValue ou_laplace(const MechanismSpec& spec, double z0, double theta, double s);

/// E_z0[exp(-mu sigma_a)], sigma_a the first passage of the OU process below a.
FormulaValue hitting_laplace(const MechanismSpec& spec, double z0, double a, double mu);
/// E_z0[exp(-mu int_0^{zeta_a} Z ds)]; same ratio as the OU hitting transform.
FormulaValue progeny_laplace(const MechanismSpec& spec, double z0, double a, double mu);

/// P_z0(Z_t -> 0) for the minimal process. Throws InconclusiveError when the
/// E test cannot decide.
FormulaValue extinction_prob(const MechanismSpec& spec, double z0);

/// Laplace transform at x of the stationary law (subordinator duals only).
FormulaValue stationary_laplace(const MechanismSpec& spec, double x);

/// P_x0(U^0 tends to 0) for the dual diffusion absorbed at zero.
FormulaValue exit_prob_u(const MechanismSpec& spec, double x0);

/// u_t(x) solving du/dt = -Psi(u), u_0 = x; c is ignored. +inf after blow-up.
FormulaValue cumulant_ode(const MechanismSpec& spec, double x, double t);

}  // namespace lcsbp
