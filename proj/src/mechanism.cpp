#include "lcsbp/mechanism.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>

#include "lcsbp/quadrature.hpp"

namespace lcsbp {

void validate(const MechanismSpec& s) {
  if (!(s.lambda >= 0) || !std::isfinite(s.lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(s.sigma >= 0) || !std::isfinite(s.sigma)) throw std::invalid_argument("sigma must be finite and >= 0");
  if (!std::isfinite(s.gamma)) throw std::invalid_argument("gamma must be finite");
  if (!(s.c > 0) || !std::isfinite(s.c)) throw std::invalid_argument("c must be finite and > 0");
  double m2 = s.levy.second_moment_below(1.0);
  double t1 = s.levy.tail(1.0);
  if (!std::isfinite(m2) || !std::isfinite(t1) || m2 < 0 || t1 < 0)
    throw std::invalid_argument("jump measure must integrate 1 ^ x^2");
  for (double x : {0.01, 0.1, 1.0, 10.0}) {
    double a = s.levy.tail(x), b = s.levy.tail(2 * x);
    if (!(b <= a * (1 + 1e-12) + 1e-300)) throw std::invalid_argument("jump tail must be nonincreasing");
  }
}

double eval_psi(const MechanismSpec& s, double z) {
  if (z < 0) throw std::invalid_argument("Psi is evaluated on z >= 0");
  if (z == 0) return -s.lambda;
  if (std::isinf(z)) {
    if (s.sigma > 0) return kInf;
  }
  double v = -s.lambda + 0.5 * s.sigma * s.sigma * z * z + s.gamma * z;
  return v + s.levy.levy_integral(z);
}

double eval_psi_over_u_integral(const MechanismSpec& s, double a, double b) {
  if (!(a > 0) || !(b >= a)) throw std::invalid_argument("need 0 < a <= b");
  if (a == b) return 0.0;
  // closed-form pieces: -lambda ln(b/a) + sigma^2 (b^2-a^2)/4 + gamma (b-a)
  double closed = -s.lambda * std::log(b / a) + 0.25 * s.sigma * s.sigma * (b * b - a * a) +
                  s.gamma * (b - a);
  if (s.levy.is_zero()) return closed;
  auto f = [&](double u) { return s.levy.levy_integral(std::exp(u)); };
  double la = std::log(a), lb = std::log(b);
  double total = 0;
  // short panels in log scale keep each Gauss-Kronrod call well resolved
  double step = 2.0;
  for (double lo = la; lo < lb; lo += step) {
    double hi = std::min(lb, lo + step);
    double err = 0;
    total += integrate_gk(f, lo, hi, 1e-12, &err);
  }
  return closed + total;
}

MechanismSpec truncate(const MechanismSpec& s, double k) {
  if (!(k > 0)) throw std::invalid_argument("truncation level must be positive");
  MechanismSpec out = s;
  double mass = s.levy.tail(k) + s.lambda;
  out.lambda = 0.0;
  out.levy = s.levy.restricted(k).with_atom(Atom{k, mass});
  return out;
}

namespace {

// int_{(0,1]} x pi(dx)
double m1_unit(const MechanismSpec& s) {
  double v = s.levy.cont_first_moment(0.0, 1.0);
  for (const auto& a : s.levy.atom_list())
    if (a.size <= 1) v += a.mass * a.size;
  return v;
}

bool structural_subordinator(const MechanismSpec& s, double* delta_out) {
  if (s.sigma > 0) return false;
  double m1 = m1_unit(s);
  if (!std::isfinite(m1)) return false;
  double slope = s.gamma + m1;  // Psi(z) = -lambda + slope z - int (1 - e^{-zx}) pi(dx)
  double scale = std::max({1.0, std::fabs(s.gamma), std::fabs(m1)});
  if (slope > 1e-13 * scale) return false;
  double delta = std::max(0.0, -slope);
  if (delta <= 1e-13 * scale) delta = 0.0;
  if (delta == 0.0 && s.lambda == 0.0 && s.levy.is_zero()) return false;  // Psi == 0
  if (delta_out) *delta_out = delta;
  return true;
}

}  // namespace

bool is_subordinator_dual(const MechanismSpec& s) {
  double delta = 0;
  bool structural = structural_subordinator(s, &delta);
  bool numeric = true, some_negative = false;
  for (int j = -20; j <= 40; ++j) {
    double z = std::ldexp(1.0, j);
    double p = eval_psi(s, z);
    double tol = 1e-12 * std::max(1.0, std::fabs(s.gamma) * z);
    if (!(p < tol)) {
      numeric = false;
      break;
    }
    if (p < -tol) some_negative = true;
  }
  numeric = numeric && some_negative;
  if (structural != numeric) {
    std::ostringstream os;
    os << "subordinator decision disagrees: structural=" << structural << " numeric=" << numeric;
    throw InconclusiveError(os.str());
  }
  return structural;
}

DriftProbe drift_delta_diagnostics(const MechanismSpec& s) {
  double delta = 0;
  if (!structural_subordinator(s, &delta))
    throw std::invalid_argument("drift delta requires a subordinator dual mechanism");
  DriftProbe out;
  out.delta = delta;
  double prev = -eval_psi(s, 1.0);
  out.slow = true;
  for (int j = 1; j <= 60; ++j) {
    double u = std::ldexp(1.0, j);
    double v = -eval_psi(s, u) / u;
    out.probe = v;
    if (std::fabs(v - prev) <= 1e-9 * std::max(std::fabs(v), 1e-300)) {
      out.slow = false;
      break;
    }
    prev = v;
  }
  return out;
}

double drift_delta(const MechanismSpec& s) { return drift_delta_diagnostics(s).delta; }

double largest_root(const MechanismSpec& s) {
  if (structural_subordinator(s, nullptr)) return kInf;
  if (s.lambda == 0 && s.sigma == 0 && s.gamma == 0 && s.levy.is_zero()) return kInf;  // Psi == 0
  // convex with Psi(0) = -lambda <= 0: {Psi <= 0} is an interval [0, rho]
  double lo = 0.0, hi = -1;
  for (int j = -60; j <= 1000; ++j) {
    double z = std::ldexp(1.0, j);
    if (eval_psi(s, z) > 0) {
      hi = z;
      break;
    }
    lo = z;
  }
  if (hi < 0) return kInf;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (eval_psi(s, mid) > 0)
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

MechanismSpec stable_mechanism(double alpha, double c) {
  MechanismSpec s;
  s.c = c;
  if (alpha == 2.0) {
    s.sigma = std::sqrt(2.0);
    return s;
  }
  if (!(alpha > 0 && alpha < 2) || alpha == 1.0)
    throw std::invalid_argument("stable mechanism needs alpha in (0,1) u (1,2]");
  double g = boost::math::tgamma(-alpha);
  double scale = (alpha - 1) / g;  // positive on both ranges
  s.levy = LevyMeasure::power_tail(alpha, scale);
  s.gamma = -scale / (1 - alpha);
  return s;
}

}  // namespace lcsbp
