#include "lcsbp/formulas.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <vector>

#include "lcsbp/classify.hpp"
#include "lcsbp/quadrature.hpp"

namespace lcsbp {

namespace {

constexpr double kLogMin = -745.0;  // below this exp() underflows
constexpr double kLogMax = 709.0;

// int exp(E(s)) ds over [s_lo, s_hi]; panels grow outward from the peak.
// err_of(s) is an absolute error bound on E(s), folded in over the bulk of the mass.
LogIntegral log_integrate(const std::function<double(double)>& E, double s_lo, double s_hi,
                          const std::function<double(double)>& err_of = nullptr) {
  LogIntegral out;
  double lo = std::max(s_lo, kLogMin), hi = std::min(s_hi, kLogMax);
  if (!(lo < hi)) {
    out.log_value = -kInf;
    return out;
  }
  double scan_lo = std::max(lo, -90.0), scan_hi = std::min(hi, 90.0);
  if (!(scan_lo < scan_hi)) scan_lo = lo, scan_hi = hi;
  double best_s = scan_lo, best = -kInf;
  int n = std::max(64, static_cast<int>((scan_hi - scan_lo) / 0.125));
  std::vector<std::pair<double, double>> scan(n + 1);
  for (int i = 0; i <= n; ++i) {
    double s = scan_lo + (scan_hi - scan_lo) * i / n;
    double e = E(s);
    scan[i] = {s, e};
    if (e > best) best = e, best_s = s;
  }
  if (!std::isfinite(best)) {
    out.log_value = best;
    out.converged = std::isinf(best) && best < 0;
    return out;
  }
  const double m = best;
  auto f = [&](double s) {
    double v = E(s) - m;
    return v < kLogMin ? 0.0 : std::exp(v);
  };
  double total = 0.0, err = 0.0;
  for (int dir : {+1, -1}) {
    double bound = dir > 0 ? hi : lo;
    bool hard = dir > 0 ? s_hi > kLogMax : s_lo < kLogMin;
    double a = best_s, w = 0.25;
    int small = 0;
    while (dir > 0 ? a < bound : a > bound) {
      double b = dir > 0 ? std::min(a + w, bound) : std::max(a - w, bound);
      double e = 0.0;
      double piece = dir > 0 ? integrate_gk(f, a, b, 1e-12, &e, 10) : integrate_gk(f, b, a, 1e-12, &e, 10);
      total += piece;
      err += e;
      a = b;
      if (a == bound) {
        if (hard && piece > 1e-13 * total) {
          out.converged = false;
          err += 10 * piece;
        }
        break;
      }
      if (piece <= 1e-17 * total && E(b) - m < -40) {
        if (++small >= 2) break;
      } else {
        small = 0;
      }
      w = std::min(w * 1.3, 16.0);
    }
  }
  // mass-weighted average of the pointwise bound over the scan
  double model_err = 0.0;
  if (err_of) {
    double wsum = 0.0;
    for (auto [s, e] : scan) {
      double w = e > m - 40 ? std::exp(e - m) : 0.0;
      if (w > 0) model_err += w * err_of(s), wsum += w;
    }
    model_err = wsum > 0 ? model_err / wsum : 0.0;
  }
  out.log_value = m + std::log(total);
  out.rel_error = total > 0 ? err / total + model_err + 1e-13 : kInf;
  return out;
}

FormulaValue ratio_value(const LogIntegral& num, const LogIntegral& den) {
  FormulaValue v;
  v.value = std::exp(num.log_value - den.log_value);
  v.error = v.value * (num.rel_error + den.rel_error);
  if (!num.converged || !den.converged) v.note = "tail truncated at the representable range";
  return v;
}

double q_of(const QTable& t, double x, double theta) { return t.q(x, theta); }

LogIntegral weighted(const QTable& t, double mu, double z, double theta) {
  double q0 = t.q1(theta);
  auto E = [&](double s) {
    double x = std::exp(s);
    return mu * s - z * x - (t.q1(x) - q0);
  };
  return log_integrate(E, -kInf, kInf, [&](double s) { return t.interp_error(std::exp(s)); });
}

// log of int_x^inf exp(Q(y)) dy
LogIntegral scale_tail(const QTable& t, double x) {
  auto E = [&](double s) { return q_of(t, std::exp(s), 1.0) + s; };
  return log_integrate(E, x > 0 ? std::log(x) : -kInf, kInf,
                       [&](double s) { return t.interp_error(std::exp(s)); });
}

void require_not_subordinator(const MechanismSpec& spec, const char* what) {
  if (is_subordinator_dual(spec))
    throw PreconditionError(std::string(what) + " needs Psi(z) >= 0 for some z > 0");
}

}  // namespace

std::shared_ptr<const QTable> shared_qtable(const MechanismSpec& spec) {
  using Entry = std::pair<MechanismSpec, std::shared_future<std::shared_ptr<const QTable>>>;
  static std::mutex mu;
  static std::deque<Entry> cache;
  std::promise<std::shared_ptr<const QTable>> promise;
  std::shared_future<std::shared_ptr<const QTable>> pending;
  {
    std::lock_guard<std::mutex> lock(mu);
    for (auto& e : cache)
      if (e.first == spec) pending = e.second;
    if (!pending.valid()) {
      cache.emplace_back(spec, promise.get_future().share());
      if (cache.size() > 16) cache.pop_front();
    }
  }
  if (pending.valid()) return pending.get();
  try {
    auto table = std::make_shared<const QTable>(spec);
    promise.set_value(table);
    return table;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard<std::mutex> lock(mu);
    for (auto it = cache.begin(); it != cache.end(); ++it)
      if (it->first == spec) {
        cache.erase(it);
        break;
      }
    throw;
  }
}

LogIntegral weighted_integral(const WeightedIntegralSpec& w) {
  if (!(w.mu >= 0) || !(w.z >= 0) || !(w.theta > 0)) throw std::invalid_argument("need mu >= 0, z >= 0, theta > 0");
  return weighted(*shared_qtable(w.spec), w.mu, w.z, w.theta);
}

double ou_laplace_exponent(const MechanismSpec& spec, double theta, double s) {
  if (!(theta > 0) || !(s >= 0)) throw std::invalid_argument("need theta > 0 and s >= 0");
  if (s == 0) return 0.0;
  double lo = theta * std::exp(-0.5 * spec.c * s);
  if (!(lo > 0)) {
    // e^{-cs/2} underflowed; split the s-range where it is still representable
    double s1 = 1400.0 / spec.c;
    return ou_laplace_exponent(spec, theta, s1) + (s - s1) * eval_psi(spec, 0.0);
  }
  return (2.0 / spec.c) * eval_psi_over_u_integral(spec, lo, theta);
}

FormulaValue ou_laplace(const MechanismSpec& spec, double z0, double theta, double s) {
  if (!(z0 >= 0)) throw std::invalid_argument("z0 must be >= 0");
  FormulaValue v;
  double ex = ou_laplace_exponent(spec, theta, s);
  double log_v = -theta * std::exp(-0.5 * spec.c * s) * z0 + ex;
  v.value = std::exp(log_v);
  v.error = v.value * (1e-10 * (1 + std::fabs(ex)) + 1e-15 * std::fabs(log_v));
  return v;
}

FormulaValue hitting_laplace(const MechanismSpec& spec, double z0, double a, double mu) {
  if (!(a >= 0) || !(z0 >= a)) throw std::invalid_argument("need z0 >= a >= 0");
  if (!(mu > 0)) throw std::invalid_argument("mu must be > 0");
  require_not_subordinator(spec, "hitting transform");
  if (z0 == a) return {1.0, 0.0, false, "already at level"};
  auto t = shared_qtable(spec);
  // x^{nu-1} e^{-Q} with nu = 2 mu / c is the eigenfunction for rate mu
  const double nu = 2.0 * mu / spec.c;
  return ratio_value(weighted(*t, nu, z0, 1.0), weighted(*t, nu, a, 1.0));
}

FormulaValue progeny_laplace(const MechanismSpec& spec, double z0, double a, double mu) {
  return hitting_laplace(spec, z0, a, mu);
}

FormulaValue extinction_prob(const MechanismSpec& spec, double z0) {
  if (!(z0 >= 0)) throw std::invalid_argument("z0 must be >= 0");
  require_not_subordinator(spec, "extinction probability");
  auto t = shared_qtable(spec);
  IntegralVerdict e = test_E(*t, 1.0);
  if (e.inconclusive()) throw InconclusiveError("E test inconclusive: " + e.note);
  if (e.diverges()) return {1.0, 0.0, false, "E diverges"};
  if (z0 == 0) return {1.0, 0.0, false, "z0 = 0"};
  return ratio_value(weighted(*t, 0.0, z0, 1.0), weighted(*t, 0.0, 0.0, 1.0));
}

FormulaValue stationary_laplace(const MechanismSpec& spec, double x) {
  if (!(x >= 0)) throw std::invalid_argument("x must be >= 0");
  if (!is_subordinator_dual(spec)) throw PreconditionError("stationary law needs a subordinator dual");
  if (!(2 * spec.lambda / spec.c < 1)) throw PreconditionError("stationary law needs 2 lambda / c < 1");
  auto a = check_condition_A(spec);
  if (a && *a) return {1.0, 0.0, true, "condition (A) holds: limit is degenerate at 0"};
  if (x == 0) return {1.0, 0.0, false, ""};
  auto t = shared_qtable(spec);
  return ratio_value(scale_tail(*t, x), scale_tail(*t, 0.0));
}

FormulaValue exit_prob_u(const MechanismSpec& spec, double x0) {
  if (!(x0 >= 0)) throw std::invalid_argument("x0 must be >= 0");
  if (!(2 * spec.lambda / spec.c < 1)) throw PreconditionError("exit law needs 2 lambda / c < 1");
  if (x0 == 0) return {1.0, 0.0, false, "x0 = 0"};
  if (!is_subordinator_dual(spec)) return {1.0, 0.0, false, "Psi >= 0 somewhere: s(inf) = inf"};
  auto a = check_condition_A(spec);
  if (a && *a) return {1.0, 0.0, false, "condition (A): s(inf) = inf"};
  auto t = shared_qtable(spec);
  return ratio_value(scale_tail(*t, x0), scale_tail(*t, 0.0));
}

FormulaValue cumulant_ode(const MechanismSpec& spec, double x, double t) {
  if (!(x > 0) || !(t >= 0)) throw std::invalid_argument("need x > 0 and t >= 0");
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 1>;
  constexpr double abs_tol = 1e-12, rel_tol = 1e-9, blow_up = 1e12;
  auto rhs = [&](const State& u, State& du, double) { du[0] = -eval_psi(spec, std::max(u[0], 0.0)); };
  auto stepper = ode::make_controlled(abs_tol, rel_tol, ode::runge_kutta_dopri5<State>());
  State u{x};
  double time = 0.0, dt = std::min(t, 1e-3 * std::max(1e-6, std::min(1.0, x)));
  FormulaValue out;
  int steps = 0;
  while (time < t) {
    if (time + dt > t) dt = t - time;
    if (stepper.try_step(rhs, u, time, dt) == ode::fail) {
      if (++steps > 10'000'000) throw std::runtime_error("cumulant ODE: step budget exhausted");
      continue;
    }
    ++steps;
    if (u[0] > blow_up) {
      out.value = kInf;
      out.note = "blow-up";
      return out;
    }
    if (u[0] <= 0) {
      // hit zero: Psi(0) = -lambda <= 0 keeps it from going below
      u[0] = 0.0;
      if (eval_psi(spec, 0.0) >= 0) {
        out.value = 0.0;
        out.note = "blow-down";
        return out;
      }
    }
  }
  out.value = u[0];
  out.error = abs_tol * std::max(1.0, t) + rel_tol * std::fabs(u[0]) * std::max(1.0, t);
  return out;
}

}  // namespace lcsbp
