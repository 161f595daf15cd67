#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lcsbp {

using Integrand = std::function<double(double)>;

enum class VerdictStatus { converges, diverges, inconclusive };
const char* to_string(VerdictStatus s);

struct IntegralVerdict {
  VerdictStatus status = VerdictStatus::inconclusive;
  double value = 0.0;  // meaningful when status == converges
  std::vector<std::pair<double, double>> evidence;  // (cutoff, partial value)
  double tol = 1e-9;
  std::string note;        // rule that decided the verdict
  bool applicable = true;  // false when the test is vacuous for the spec

  bool converges() const { return status == VerdictStatus::converges; }
  bool diverges() const { return status == VerdictStatus::diverges; }
  bool inconclusive() const { return status == VerdictStatus::inconclusive; }
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate(estimate), error_bound(error_bound) {}
  double estimate;
  double error_bound;
};

/// Integral of f over [a,b]; either end may be infinite. Endpoint
/// singularities are handled by double-exponential rules, with a fallback
/// to geometric panels refined toward both ends.
double integrate(const Integrand& f, double a, double b, double tol = 1e-10);

/// Plain adaptive Gauss-Kronrod on a finite interval.
double integrate_gk(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                    double* error = nullptr, unsigned max_depth = 20);

enum class SingularEnd { lower, upper };

struct ProbeOptions {
  double tol = 1e-9;
  int n_max = 60;
  double divergence_threshold = 1e12;
  // nondecreasing panel contributions only count as divergence past this index
  int min_divergence_index = 10;
  // geometric decay of panel contributions with ratio below this is accepted
  double ratio_max = 0.9;
  // per-panel adaptive Gauss-Kronrod controls
  double panel_rel_tol = 1e-12;
  unsigned panel_max_depth = 20;
};

/// Decide convergence of the integral of f over (0, fixed_end] (lower) or
/// [fixed_end, inf) (upper) from partial integrals at dyadic cutoffs.
IntegralVerdict probe_improper(const Integrand& f, SingularEnd end, double fixed_end,
                               double tol = 1e-9);
IntegralVerdict probe_improper(const Integrand& f, SingularEnd end, double fixed_end,
                               const ProbeOptions& opt);

}  // namespace lcsbp
