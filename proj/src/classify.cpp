#include "lcsbp/classify.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

namespace lcsbp {

namespace bq = boost::math::quadrature;

const char* to_string(ZInfinity v) {
  switch (v) {
    case ZInfinity::entrance: return "entrance";
    case ZInfinity::regular_reflecting: return "regular-reflecting";
    case ZInfinity::exit: return "exit";
    default: return "inconclusive";
  }
}
const char* to_string(ZZero v) {
  switch (v) {
    case ZZero::exit: return "exit";
    case ZZero::natural: return "natural";
    default: return "inconclusive";
  }
}
const char* to_string(UZero v) {
  switch (v) {
    case UZero::exit: return "exit";
    case UZero::regular_absorbing: return "regular-absorbing";
    case UZero::entrance: return "entrance";
    case UZero::natural: return "natural";
    default: return "inconclusive";
  }
}
const char* to_string(UInfinity v) {
  switch (v) {
    case UInfinity::entrance: return "entrance";
    case UInfinity::natural: return "natural";
    default: return "inconclusive";
  }
}

UZero u_zero_from(ZInfinity z) {
  switch (z) {
    case ZInfinity::entrance: return UZero::exit;
    case ZInfinity::regular_reflecting: return UZero::regular_absorbing;
    case ZInfinity::exit: return UZero::entrance;
    default: return UZero::inconclusive;
  }
}

UInfinity u_infinity_from(ZZero z) {
  switch (z) {
    case ZZero::exit: return UInfinity::entrance;
    case ZZero::natural: return UInfinity::natural;
    default: return UInfinity::inconclusive;
  }
}

bool BoundaryReport::any_inconclusive() const {
  return z_at_infinity == ZInfinity::inconclusive || z_at_zero == ZZero::inconclusive ||
         u_at_zero == UZero::inconclusive || u_at_infinity == UInfinity::inconclusive ||
         u_at_zero_feller == UZero::inconclusive ||
         u_at_infinity_feller == UInfinity::inconclusive;
}

namespace {

void note(ShortcutLog* log, const std::string& s) {
  if (log) log->push_back(s);
}

// Settle a verdict from an exact shortcut and a numeric probe: the shortcut
// wins, a contradicting probe is recorded.
IntegralVerdict combine(IntegralVerdict numeric, std::optional<VerdictStatus> shortcut,
                        const std::string& name, const std::string& rule, ShortcutLog* log,
                        std::vector<std::string>* discrepancies = nullptr) {
  if (!shortcut) return numeric;
  note(log, name + ": " + rule);
  if (!numeric.inconclusive() && numeric.status != *shortcut) {
    std::string msg = name + ": probe said " + to_string(numeric.status) + ", shortcut '" + rule +
                      "' says " + to_string(*shortcut);
    if (discrepancies) discrepancies->push_back(msg);
    note(log, msg);
    numeric.note += "; overridden by shortcut";
  } else if (numeric.inconclusive()) {
    numeric.note += "; decided by shortcut";
  } else {
    numeric.note += "; shortcut agrees";
  }
  numeric.status = *shortcut;
  return numeric;
}

// kappa(t) >= 1.05 at every probe point => converges; <= 0.95 everywhere => diverges.
std::optional<VerdictStatus> log_index_decision(const std::function<double(double)>& kappa,
                                                std::string* detail) {
  const double ts[] = {100.0, 200.0, 400.0, 650.0};
  bool all_above = true, all_below = true;
  std::ostringstream os;
  os << "log-index";
  for (double t : ts) {
    double k = kappa(t);
    os << " k(" << t << ")=" << k;
    if (!(k >= 1.05)) all_above = false;
    if (!(k <= 0.95)) all_below = false;
  }
  if (detail) *detail = os.str();
  if (all_above) return VerdictStatus::converges;
  if (all_below) return VerdictStatus::diverges;
  return std::nullopt;
}

std::optional<VerdictStatus> e_shortcut(const MechanismSpec& s, std::string* rule) {
  if (s.lambda > 0) {
    *rule = "lambda > 0 => converges";
    return VerdictStatus::converges;
  }
  double lm = s.levy.log_moment();
  if (std::isfinite(lm)) {
    *rule = "lambda = 0 and finite log-moment => diverges";
    return VerdictStatus::diverges;
  }
  // density alpha / (u (log u)^{beta+1}) on u >= 2; sigma, gamma and atoms do
  // not move the threshold. beta > 1 was caught above by the log-moment.
  if (s.levy.kind() == LevyKind::log_tail && std::isinf(s.levy.cut())) {
    if (s.levy.beta() < 1) {
      *rule = "log tail with beta < 1 => converges";
      return VerdictStatus::converges;
    }
    if (s.levy.beta() == 1) {
      bool finite = 2 * s.levy.alpha() / s.c > 1;
      *rule = "log tail with beta = 1: converges iff 2 alpha / c > 1";
      return finite ? VerdictStatus::converges : VerdictStatus::diverges;
    }
  }
  return std::nullopt;
}

IntegralVerdict finish_with_log_index(IntegralVerdict v, const std::function<double(double)>& kappa,
                                      const std::string& name, ShortcutLog* log) {
  if (!v.inconclusive()) return v;
  std::string detail;
  auto d = log_index_decision(kappa, &detail);
  if (d) {
    v.status = *d;
    v.note += "; " + detail;
    note(log, name + ": " + detail + " => " + to_string(*d));
  } else {
    v.note += "; " + detail + " undecided";
  }
  return v;
}

// r(s) = log(int e^{phi}) - phi(s) for the running integral of e^{phi(u)} du
// from -inf to s (lower) or from s to +inf (upper), on a uniform grid in s.
// Storing the ratio rather than the log-integral avoids cancelling two huge
// numbers when phi is far from zero. The tails beyond the grid are closed by
// assuming phi is linear there.
class CumulativeRatio {
 public:
  CumulativeRatio(const std::function<double(double)>& phi, double s_lo, double s_hi, double h,
                  bool lower)
      : s0_(s_lo), h_(h), lower_(lower), phi_(phi) {
    int n = static_cast<int>(std::llround((s_hi - s_lo) / h)) + 1;
    node_.resize(n);
    for (int i = 0; i < n; ++i) node_[i] = phi(s_lo + i * h);
    r_.assign(n, kInf);
    // edge node j, inner neighbour i; slope of phi moving outward
    auto tail = [&](int i, int j) {
      double slope = (node_[j] - node_[i]) / h;
      return slope < -1e-3 ? -std::log(-slope) : kInf;
    };
    if (lower) {
      r_[0] = tail(1, 0);
      for (int i = 1; i < n; ++i) {
        double a = s_lo + (i - 1) * h;
        double v = piece(phi, a, a + h, node_[i]);
        r_[i] = logaddexp(r_[i - 1] + (node_[i - 1] - node_[i]), v > 0 ? std::log(v) : -kInf);
      }
    } else {
      r_[n - 1] = tail(n - 2, n - 1);
      for (int i = n - 2; i >= 0; --i) {
        double a = s_lo + i * h;
        double v = piece(phi, a, a + h, node_[i]);
        r_[i] = logaddexp(r_[i + 1] + (node_[i + 1] - node_[i]), v > 0 ? std::log(v) : -kInf);
      }
    }
  }

  double operator()(double s) const {
    double pos = (s - s0_) / h_;
    int n = static_cast<int>(r_.size());
    int i = std::clamp(static_cast<int>(std::floor(pos)), 0, n - 2);
    double a = s0_ + i * h_, b = a + h_;
    double ps = phi_(s);
    // exact piece between the node and s keeps the value smooth in s
    if (lower_) {
      double v = s > a ? piece(phi_, a, s, ps) : 0.0;
      return logaddexp(r_[i] + (node_[i] - ps), v > 0 ? std::log(v) : -kInf);
    }
    double v = s < b ? piece(phi_, s, b, ps) : 0.0;
    return logaddexp(r_[i + 1] + (node_[i + 1] - ps), v > 0 ? std::log(v) : -kInf);
  }

 private:
  // int_a^b e^{phi - m}. Where phi drops by many units across the cell the
  // mass sits against the higher end and the endpoint Laplace form is
  // accurate to O(1/|phi'|).
  static double piece(const std::function<double(double)>& phi, double a, double b, double m) {
    double pa = phi(a), pb = phi(b);
    double drop = std::fabs(pa - pb);
    if (!(drop > 20)) {
      auto f = [&](double u) { return std::exp(phi(u) - m); };
      return bq::gauss_kronrod<double, 15>::integrate(f, a, b, 0);
    }
    double e = pa > pb ? a : b, pe = std::max(pa, pb);
    double d = 1e-7 * (b - a) * (pa > pb ? 1 : -1);
    double slope = std::fabs(phi(e + d) - pe) / std::fabs(d);
    if (!(slope > 0)) slope = drop / (b - a);
    return std::exp(pe - m) * -std::expm1(-drop) / slope;
  }
  static double logaddexp(double a, double b) {
    if (a == kInf || b == kInf) return kInf;
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
  }
  double s0_, h_;
  bool lower_;
  std::function<double(double)> phi_;
  std::vector<double> node_, r_;
};

// Integrands built on the interpolated Q table are only C^1 at the knots.
ProbeOptions table_probe_options() {
  ProbeOptions opt;
  opt.panel_rel_tol = 1e-10;
  opt.panel_max_depth = 10;
  return opt;
}

struct FellerContext {
  const QTable& table;
  double theta;
  double qtheta;
  double c;
  double q(double x) const { return table.q1(x) - qtheta; }
};

}  // namespace

IntegralVerdict test_E(const QTable& table, double theta, ShortcutLog* log) {
  if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
  const MechanismSpec& s = table.spec();
  double qt = table.q1(theta);
  auto f = [&](double x) {
    double e = -(table.q1(x) - qt);
    return std::exp(e) / x;
  };
  IntegralVerdict v = probe_improper(f, SingularEnd::lower, theta, table_probe_options());
  std::string rule;
  auto sc = e_shortcut(s, &rule);
  v = combine(v, sc, "E", rule, log);
  auto kappa = [&](double t) { return -(2.0 / s.c) * t * eval_psi(s, std::exp(-t)); };
  return finish_with_log_index(v, kappa, "E", log);
}

IntegralVerdict test_E(const MechanismSpec& spec, double theta, ShortcutLog* log) {
  QTable table(spec);
  return test_E(table, theta, log);
}

namespace {

// Fixed nodes on unit panels in w = log v keep both functions smooth in x,
// which the outer adaptive rule needs.
double e_prime_panels(const MechanismSpec& s, double x, bool slope) {
  auto g = [&](double w) {
    double v = std::exp(w);
    double e = std::exp(-x * v) * s.levy.tail(v);
    return slope ? x * v * e : e;
  };
  double wmax = std::ceil(std::log(60.0 / x));
  double total = 0.0;
  for (double lo = 0.0; lo < wmax; lo += 1.0)
    total += boost::math::quadrature::gauss<double, 20>::integrate(g, lo, lo + 1.0);
  return total;
}

// (2/c) int_1^inf e^{-xv} tail(v)/v dv
double e_prime_exponent(const MechanismSpec& s, double x) {
  return (2.0 / s.c) * e_prime_panels(s, x, false);
}

// x int_1^inf e^{-xv} tail(v) dv
double e_prime_slope(const MechanismSpec& s, double x) { return e_prime_panels(s, x, true); }

}  // namespace

IntegralVerdict test_E_prime(const MechanismSpec& s, double theta, ShortcutLog* log,
                             const IntegralVerdict* e_verdict) {
  if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
  if (s.lambda != 0.0) {
    IntegralVerdict v;
    v.applicable = false;
    v.note = "requires lambda = 0";
    return v;
  }
  // G(e^t) on a grid in t = log x, cubic Hermite with its exact slope
  const double h = std::log(2.0) / 16;
  const double t_hi = std::log(theta);
  const int n = 64 * 16 + 1;
  std::vector<double> gv(n), gd(n);
  for (int i = 0; i < n; ++i) {
    double x = std::exp(t_hi - i * h);
    gv[i] = e_prime_exponent(s, x);
    gd[i] = -(2.0 / s.c) * e_prime_slope(s, x);  // dG/dt
  }
  auto G = [&](double x) {
    double pos = (t_hi - std::log(x)) / h;
    if (pos < 0 || pos > n - 1) return e_prime_exponent(s, x);
    int i = std::min(static_cast<int>(pos), n - 2);
    double u = pos - i, u2 = u * u, u3 = u2 * u;
    // node i is at the larger x; moving along pos decreases t
    return (2 * u3 - 3 * u2 + 1) * gv[i] + (u3 - 2 * u2 + u) * (-h) * gd[i] +
           (-2 * u3 + 3 * u2) * gv[i + 1] + (u3 - u2) * (-h) * gd[i + 1];
  };
  auto f = [&](double x) { return std::exp(-G(x)) / x; };
  ProbeOptions opt;
  opt.panel_rel_tol = 1e-10;
  opt.panel_max_depth = 6;
  IntegralVerdict v = probe_improper(f, SingularEnd::lower, theta, opt);
  std::string rule;
  auto sc = e_shortcut(s, &rule);
  v = combine(v, sc, "E'", rule, log);
  auto kappa = [&](double t) { return (2.0 / s.c) * t * e_prime_slope(s, std::exp(-t)); };
  v = finish_with_log_index(v, kappa, "E'", log);

  IntegralVerdict e = e_verdict ? *e_verdict : test_E(s, theta, nullptr);
  if (!v.inconclusive() && !e.inconclusive() && v.status != e.status) {
    std::ostringstream os;
    os << "E' " << to_string(v.status) << " disagrees with E " << to_string(e.status);
    v.status = VerdictStatus::inconclusive;
    v.note += "; " + os.str();
    v.evidence.insert(v.evidence.end(), e.evidence.begin(), e.evidence.end());
    note(log, os.str());
  }
  return v;
}

IntegralVerdict test_grey(const MechanismSpec& s, ShortcutLog* log) {
  double rho = largest_root(s);
  if (std::isinf(rho)) {
    IntegralVerdict v;
    v.applicable = false;
    v.status = VerdictStatus::diverges;
    v.note = "Psi never positive: 0 inaccessible";
    return v;
  }
  double a = rho + 1.0;
  auto f = [&](double u) { return 1.0 / eval_psi(s, u); };
  IntegralVerdict v = probe_improper(f, SingularEnd::upper, a, ProbeOptions{});
  std::optional<VerdictStatus> sc;
  std::string rule;
  if (s.sigma > 0) {
    sc = VerdictStatus::converges;
    rule = "sigma > 0 => converges";
  } else if (std::isfinite(s.levy.first_moment(0.0, 1.0))) {
    sc = VerdictStatus::diverges;
    rule = "sigma = 0 and bounded variation => diverges";
  }
  return combine(v, sc, "Grey", rule, log);
}

std::optional<bool> check_condition_A(const MechanismSpec& s) {
  bool sub = is_subordinator_dual(s);
  if (!sub || !(2.0 * s.lambda / s.c < 1.0)) return std::nullopt;
  double delta = drift_delta(s);
  double mass = s.levy.total_mass();
  return delta == 0.0 && std::isfinite(mass) && mass + s.lambda <= s.c / 2.0;
}

namespace {

// Outer probe of a nested Feller integral whose inner part is given.
IntegralVerdict nested_probe(const std::function<double(double)>& outer, SingularEnd end,
                             double theta) {
  ProbeOptions opt;
  opt.tol = 1e-8;
  opt.panel_rel_tol = 1e-9;
  opt.panel_max_depth = 6;
  return probe_improper(outer, end, theta, opt);
}

}  // namespace

FellerResult feller_tests_U(const QTable& table, double theta, const IntegralVerdict* e_verdict,
                            const IntegralVerdict* grey_verdict) {
  if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
  const MechanismSpec& s = table.spec();
  FellerContext ctx{table, theta, table.q1(theta), s.c};
  FellerResult out;
  ShortcutLog* log = &out.shortcuts_used;

  IntegralVerdict e_local, grey_local;
  if (!e_verdict) {
    e_local = test_E(table, theta, nullptr);
    e_verdict = &e_local;
  }
  if (!grey_verdict) {
    grey_local = test_grey(s, nullptr);
    grey_verdict = &grey_local;
  }
  const double two_l_c = 2.0 * s.lambda / s.c;

  const double s_lo = std::log(table.x_min()), s_hi = std::log(table.x_max());
  const double h = std::log(2.0) / 16;
  auto qs = [&](double t) { return ctx.q(std::exp(t)); };

  // Each test first decides the finiteness of the inner integral at the
  // boundary (s(0), M(0), s(inf), M(inf)); when that is infinite the outer
  // integral is too.
  struct Piece {
    const char* name;
    const char* pre_name;
    SingularEnd end;
    bool scale;  // inner integrand e^{Q} (scale) or e^{-Q}/x (speed)
  };
  const Piece pieces[] = {{"I0", "|s(0)|", SingularEnd::lower, true},
                          {"J0", "|M(0)|", SingularEnd::lower, false},
                          {"I_inf", "s(inf)", SingularEnd::upper, true},
                          {"J_inf", "M(inf)", SingularEnd::upper, false}};
  for (const Piece& p : pieces) {
    std::function<double(double)> pre_f;
    if (p.scale) pre_f = [&](double y) { return std::exp(ctx.q(y)); };
    else pre_f = [&](double x) { return std::exp(-ctx.q(x)) / (s.c * x); };
    IntegralVerdict pre = probe_improper(pre_f, p.end, theta, table_probe_options());
    IntegralVerdict v;
    if (pre.diverges()) {
      v = pre;
      v.note = std::string(p.pre_name) + " = inf: " + pre.note;
    } else if (pre.converges()) {
      bool lower = p.end == SingularEnd::lower;
      // phi in s = log y: e^{Q} dy = e^{Q+s} ds, e^{-Q} dx / x = e^{-Q} ds
      std::function<double(double)> phi;
      if (p.scale) phi = [&](double t) { return qs(t) + t; };
      else phi = [&](double t) { return -qs(t); };
      CumulativeRatio ratio(phi, s_lo, s_hi, h, lower);
      // in every case the outer integrand reduces to e^{r(log x)} / c:
      //   (s(x) - s(0)) m(x), (s(inf) - s(x)) m(x), (M(z) - M(0)) s'(z), (M(inf) - M(z)) s'(z)
      auto outer = [&](double x) { return std::exp(ratio(std::log(x))) / s.c; };
      v = nested_probe(outer, p.end, theta);
      v.note = std::string(p.pre_name) + " finite; " + v.note;
    } else {
      v = pre;
      v.note = std::string(p.pre_name) + " undecided";
    }
    std::optional<VerdictStatus> sc;
    std::string rule;
    if (std::string(p.name) == "I0") {
      sc = two_l_c < 1 ? VerdictStatus::converges : VerdictStatus::diverges;
      rule = "finite iff 2 lambda / c < 1";
    } else if (std::string(p.name) == "J0") {
      if (!e_verdict->inconclusive()) sc = e_verdict->status;
      rule = "same nature as E";
    } else if (std::string(p.name) == "I_inf") {
      sc = VerdictStatus::diverges;
      rule = "always infinite";
    } else {
      if (!grey_verdict->inconclusive()) sc = grey_verdict->status;
      rule = "same nature as Grey";
    }
    out.verdicts[p.name] = combine(v, sc, p.name, rule, log, &out.discrepancies);
  }

  const auto& I0 = out.verdicts["I0"];
  const auto& J0 = out.verdicts["J0"];
  if (!I0.inconclusive() && !J0.inconclusive()) {
    if (I0.converges() && J0.diverges()) out.u_at_zero = UZero::exit;
    else if (I0.converges() && J0.converges()) out.u_at_zero = UZero::regular_absorbing;
    else if (I0.diverges() && J0.converges()) out.u_at_zero = UZero::entrance;
    else out.u_at_zero = UZero::natural;
  }
  const auto& Iinf = out.verdicts["I_inf"];
  const auto& Jinf = out.verdicts["J_inf"];
  if (!Jinf.inconclusive()) {
    if (Iinf.diverges() && Jinf.converges()) out.u_at_infinity = UInfinity::entrance;
    else out.u_at_infinity = UInfinity::natural;
  }
  return out;
}

FellerResult feller_tests_U(const MechanismSpec& spec, double theta) {
  QTable table(spec);
  return feller_tests_U(table, theta);
}

BoundaryReport classify_all(const MechanismSpec& spec, double theta) {
  validate(spec);
  if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
  BoundaryReport r;
  r.theta = theta;
  r.two_lambda_over_c = 2.0 * spec.lambda / spec.c;
  QTable table(spec);

  IntegralVerdict e = test_E(table, theta, &r.shortcuts_used);
  IntegralVerdict grey = test_grey(spec, &r.shortcuts_used);
  r.verdicts["E"] = e;
  r.verdicts["Grey"] = grey;
  if (spec.lambda == 0.0) r.verdicts["E_prime"] = test_E_prime(spec, theta, &r.shortcuts_used, &e);

  if (r.two_lambda_over_c >= 1.0) {
    r.z_at_infinity = ZInfinity::exit;
  } else if (e.diverges()) {
    r.z_at_infinity = ZInfinity::entrance;
  } else if (e.converges()) {
    r.z_at_infinity = ZInfinity::regular_reflecting;
  }
  if (!grey.inconclusive()) r.z_at_zero = grey.converges() ? ZZero::exit : ZZero::natural;
  r.u_at_zero = u_zero_from(r.z_at_infinity);
  r.u_at_infinity = u_infinity_from(r.z_at_zero);

  FellerResult fr = feller_tests_U(table, theta, &e, &grey);
  for (auto& [k, v] : fr.verdicts) r.verdicts[k] = v;
  r.shortcuts_used.insert(r.shortcuts_used.end(), fr.shortcuts_used.begin(),
                          fr.shortcuts_used.end());
  r.discrepancies = fr.discrepancies;
  r.u_at_zero_feller = fr.u_at_zero;
  r.u_at_infinity_feller = fr.u_at_infinity;
  r.correspondence_ok = r.u_at_zero == r.u_at_zero_feller &&
                        r.u_at_infinity == r.u_at_infinity_feller &&
                        r.u_at_zero != UZero::inconclusive &&
                        r.u_at_infinity != UInfinity::inconclusive;

  try {
    r.subordinator_dual = is_subordinator_dual(spec);
    r.condition_A = check_condition_A(spec);
  } catch (const InconclusiveError& ex) {
    r.discrepancies.push_back(ex.what());
  }

  for (double th : {0.5, 1.0, 2.0}) {
    VerdictStatus st = th == theta ? e.status : test_E(table, th, nullptr).status;
    r.theta_consistency[th] = st;
    if (st != e.status) r.theta_consistent = false;
  }
  return r;
}

}  // namespace lcsbp
