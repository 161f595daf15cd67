#include "lcsbp/levy.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

#include "lcsbp/quadrature.hpp"

namespace lcsbp {

struct LevyMeasure::Data {
  LevyKind kind = LevyKind::none;
  double alpha = 0, beta = 0, scale = 0;
  std::vector<double> grid, density;
  std::vector<double> tail_at;  // tail at grid nodes, tabulated kind
  std::function<double(double)> utail, um2;
  std::string label;
  double cut = kInf;
  std::vector<Atom> atoms;  // sorted by size
};

LevyMeasure::LevyMeasure() : d_(std::make_shared<Data>()) {}
LevyMeasure::LevyMeasure(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

LevyMeasure LevyMeasure::null_measure() { return LevyMeasure(); }

LevyMeasure LevyMeasure::atoms(std::vector<Atom> a) {
  for (const auto& x : a)
    if (!(x.size > 0) || !(x.mass >= 0) || !std::isfinite(x.size) || !std::isfinite(x.mass))
      throw std::invalid_argument("atoms need positive finite size and nonnegative mass");
  auto d = std::make_shared<Data>();
  std::stable_sort(a.begin(), a.end(), [](const Atom& x, const Atom& y) { return x.size < y.size; });
  d->atoms = std::move(a);
  return LevyMeasure(d);
}

LevyMeasure LevyMeasure::power_tail(double alpha, double scale) {
  if (!(alpha > 0 && alpha < 2)) throw std::invalid_argument("power tail needs alpha in (0,2)");
  if (!(scale >= 0) || !std::isfinite(scale)) throw std::invalid_argument("power tail scale must be >= 0");
  auto d = std::make_shared<Data>();
  d->kind = scale > 0 ? LevyKind::power_tail : LevyKind::none;
  d->alpha = alpha;
  d->scale = scale;
  if (scale == 0) d->alpha = 0;
  return LevyMeasure(d);
}

LevyMeasure LevyMeasure::log_tail(double alpha, double beta) {
  if (!(alpha > 0) || !(beta > 0)) throw std::invalid_argument("log tail needs alpha > 0, beta > 0");
  auto d = std::make_shared<Data>();
  d->kind = LevyKind::log_tail;
  d->alpha = alpha;
  d->beta = beta;
  return LevyMeasure(d);
}

LevyMeasure LevyMeasure::tabulated(std::vector<double> grid, std::vector<double> density) {
  if (grid.size() < 2 || grid.size() != density.size())
    throw std::invalid_argument("tabulated density needs matching grid and values (>= 2 points)");
  if (!(grid.front() >= 0)) throw std::invalid_argument("tabulated grid must be nonnegative");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("tabulated grid must be increasing");
  for (double v : density)
    if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("tabulated density must be finite and >= 0");
  auto d = std::make_shared<Data>();
  d->kind = LevyKind::tabulated;
  size_t n = grid.size();
  d->tail_at.assign(n, 0.0);
  for (size_t i = n - 1; i-- > 0;) {
    double h = grid[i + 1] - grid[i];
    d->tail_at[i] = d->tail_at[i + 1] + 0.5 * h * (density[i] + density[i + 1]);
  }
  d->grid = std::move(grid);
  d->density = std::move(density);
  return LevyMeasure(d);
}

LevyMeasure LevyMeasure::user_tail(std::function<double(double)> tail,
                                   std::function<double(double)> m2, std::string label) {
  if (!tail || !m2) throw std::invalid_argument("user tail needs tail and second-moment callables");
  auto d = std::make_shared<Data>();
  d->kind = LevyKind::user_tail;
  d->utail = std::move(tail);
  d->um2 = std::move(m2);
  d->label = std::move(label);
  return LevyMeasure(d);
}

LevyKind LevyMeasure::kind() const { return d_->kind; }
double LevyMeasure::alpha() const { return d_->alpha; }
double LevyMeasure::beta() const { return d_->beta; }
double LevyMeasure::scale() const { return d_->scale; }
const std::vector<double>& LevyMeasure::grid() const { return d_->grid; }
const std::vector<double>& LevyMeasure::density() const { return d_->density; }
const std::string& LevyMeasure::label() const { return d_->label; }
double LevyMeasure::cut() const { return d_->cut; }
const std::vector<Atom>& LevyMeasure::atom_list() const { return d_->atoms; }

LevyMeasure LevyMeasure::restricted(double k) const {
  if (!(k > 0)) throw std::invalid_argument("restriction level must be positive");
  auto d = std::make_shared<Data>(*d_);
  d->cut = std::min(d->cut, k);
  std::vector<Atom> kept;
  for (const auto& a : d->atoms)
    if (a.size < k) kept.push_back(a);
  d->atoms = std::move(kept);
  return LevyMeasure(d);
}

LevyMeasure LevyMeasure::with_atom(Atom a) const {
  if (!(a.size > 0) || !(a.mass >= 0)) throw std::invalid_argument("bad atom");
  auto d = std::make_shared<Data>(*d_);
  d->atoms.push_back(a);
  std::stable_sort(d->atoms.begin(), d->atoms.end(),
                   [](const Atom& x, const Atom& y) { return x.size < y.size; });
  return LevyMeasure(d);
}

bool LevyMeasure::has_continuous() const { return d_->kind != LevyKind::none; }

bool LevyMeasure::is_zero() const {
  if (has_continuous() && cont_tail(0x1p-60) > 0) return false;
  for (const auto& a : d_->atoms)
    if (a.mass > 0) return false;
  return true;
}

// ---- raw (unrestricted) continuous part -----------------------------------

double LevyMeasure::raw_tail(double x) const {
  const Data& d = *d_;
  switch (d.kind) {
    case LevyKind::none: return 0.0;
    case LevyKind::power_tail: return d.scale * std::pow(x, -d.alpha) / d.alpha;
    case LevyKind::log_tail: {
      double lx = std::log(std::max(x, 2.0));
      return d.alpha / (d.beta * std::pow(lx, d.beta));
    }
    case LevyKind::tabulated: {
      const auto& g = d.grid;
      if (x <= g.front()) return d.tail_at.front();
      if (x >= g.back()) return 0.0;
      size_t i = std::upper_bound(g.begin(), g.end(), x) - g.begin() - 1;
      double h = g[i + 1] - g[i];
      double w = (x - g[i]) / h;
      double fx = d.density[i] + w * (d.density[i + 1] - d.density[i]);
      return d.tail_at[i + 1] + 0.5 * (g[i + 1] - x) * (fx + d.density[i + 1]);
    }
    case LevyKind::user_tail: return d.utail(x);
  }
  return 0.0;
}

namespace {

// integral of x^p * (linear density) over [a,b] within one tabulated segment
double seg_moment(double a, double b, double x0, double f0, double x1, double f1, int p) {
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    double x = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
    double f = f0 + (f1 - f0) * (x - x0) / (x1 - x0);
    s += gw[i] * std::pow(x, p) * f;
  }
  return 0.5 * (b - a) * s;
}

double tab_moment(const std::vector<double>& g, const std::vector<double>& f, double a, double b, int p) {
  double s = 0;
  for (size_t i = 0; i + 1 < g.size(); ++i) {
    double lo = std::max(a, g[i]), hi = std::min(b, g[i + 1]);
    if (hi > lo) s += seg_moment(lo, hi, g[i], f[i], g[i + 1], f[i + 1], p);
  }
  return s;
}

}  // namespace

double LevyMeasure::raw_m2(double eps) const {
  const Data& d = *d_;
  if (!(eps > 0)) return 0.0;
  switch (d.kind) {
    case LevyKind::none: return 0.0;
    case LevyKind::power_tail: return d.scale * std::pow(eps, 2 - d.alpha) / (2 - d.alpha);
    case LevyKind::log_tail: {
      if (eps <= 2) return 0.0;
      auto f = [&](double s) {  // x = e^s
        double x = std::exp(s);
        return d.alpha * x * x / std::pow(s, d.beta + 1);
      };
      return integrate_gk(f, std::log(2.0), std::log(eps));
    }
    case LevyKind::tabulated: return tab_moment(d.grid, d.density, 0, eps, 2);
    case LevyKind::user_tail: return d.um2(eps);
  }
  return 0.0;
}

double LevyMeasure::raw_m1(double a, double b) const {
  const Data& d = *d_;
  if (!(b > a)) return 0.0;
  switch (d.kind) {
    case LevyKind::none: return 0.0;
    case LevyKind::power_tail: {
      if (a <= 0 && d.alpha >= 1) return kInf;
      if (std::isinf(b) && d.alpha <= 1) return kInf;
      if (d.alpha == 1) return d.scale * std::log(b / a);
      double e = 1 - d.alpha;
      double hb = std::isinf(b) ? 0.0 : std::pow(b, e);
      double ha = a <= 0 ? 0.0 : std::pow(a, e);
      return d.scale * (hb - ha) / e;
    }
    case LevyKind::log_tail: {
      double lo = std::max(a, 2.0);
      if (!(b > lo)) return 0.0;
      if (std::isinf(b)) return kInf;
      auto f = [&](double s) {
        double x = std::exp(s);
        return d.alpha * x / std::pow(s, d.beta + 1);
      };
      return integrate_gk(f, std::log(lo), std::log(b));
    }
    case LevyKind::tabulated: return tab_moment(d.grid, d.density, a, b, 1);
    case LevyKind::user_tail: {
      // x dpi = a T(a) - b T(b) + int_a^b T
      double lo = std::max(a, 1e-300);
      double hiT = std::isinf(b) ? 0.0 : b * raw_tail(b);
      auto f = [&](double s) {
        double x = std::exp(s);
        return raw_tail(x) * x;
      };
      double hi = std::isinf(b) ? 1e300 : b;
      double integral;
      try {
        integral = integrate(f, std::log(lo), std::log(hi), 1e-10);
      } catch (const QuadratureError& e) {
        integral = e.estimate;
      }
      return lo * raw_tail(lo) - hiT + integral;
    }
  }
  return 0.0;
}

double LevyMeasure::raw_inverse_tail(double t) const {
  const Data& d = *d_;
  switch (d.kind) {
    case LevyKind::none: return kInf;
    case LevyKind::power_tail: return std::pow(d.alpha * t / d.scale, -1.0 / d.alpha);
    case LevyKind::log_tail: {
      double t2 = d.alpha / (d.beta * std::pow(std::log(2.0), d.beta));
      if (t >= t2) return 2.0;
      return std::exp(std::pow(d.alpha / (d.beta * t), 1.0 / d.beta));
    }
    default: break;
  }
  // monotone bisection in log scale
  double lo = -745.0, hi = 709.0;
  if (d.kind == LevyKind::tabulated) {
    lo = std::log(std::max(d.grid.front(), 1e-300));
    hi = std::log(d.grid.back());
    if (t >= raw_tail(d.grid.front())) return d.grid.front();
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (raw_tail(std::exp(mid)) > t)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * std::max(1.0, std::fabs(hi))) break;
  }
  return std::exp(hi);
}

double LevyMeasure::support_max() const {
  double m = d_->cut;
  if (d_->kind == LevyKind::tabulated) m = std::min(m, d_->grid.back());
  if (d_->kind == LevyKind::none) m = 0;
  return m;
}

// ---- continuous part restricted to (0, cut) ------------------------------

double LevyMeasure::cont_tail(double x) const {
  if (d_->kind == LevyKind::none) return 0.0;
  if (x >= d_->cut) return 0.0;
  double base = std::isinf(d_->cut) ? 0.0 : raw_tail(d_->cut);
  return std::max(raw_tail(x) - base, 0.0);
}

double LevyMeasure::cont_inverse_tail(double t) const {
  double base = std::isinf(d_->cut) ? 0.0 : raw_tail(d_->cut);
  double x = raw_inverse_tail(t + base);
  return std::min(x, d_->cut);
}

double LevyMeasure::cont_second_moment_below(double eps) const {
  return raw_m2(std::min(eps, d_->cut));
}

double LevyMeasure::cont_first_moment(double a, double b) const {
  return raw_m1(a, std::min(b, d_->cut));
}

// ---- whole measure --------------------------------------------------------

double LevyMeasure::tail(double x) const {
  double s = cont_tail(x);
  for (const auto& a : d_->atoms)
    if (a.size >= x) s += a.mass;
  return s;
}

double LevyMeasure::total_mass() const {
  double atoms = 0;
  for (const auto& a : d_->atoms) atoms += a.mass;
  switch (d_->kind) {
    case LevyKind::none: return atoms;
    case LevyKind::power_tail: return kInf;
    case LevyKind::log_tail:
    case LevyKind::tabulated: return atoms + cont_tail(1e-300);
    case LevyKind::user_tail: {
      double t50 = cont_tail(0x1p-50), t60 = cont_tail(0x1p-60);
      if (!std::isfinite(t60) || (t60 - t50) > 1e-9 * t60) return kInf;
      return atoms + t60;
    }
  }
  return atoms;
}

double LevyMeasure::second_moment_below(double eps) const {
  double s = cont_second_moment_below(eps);
  for (const auto& a : d_->atoms)
    if (a.size < eps) s += a.mass * a.size * a.size;
  return s;
}

double LevyMeasure::first_moment(double a, double b) const {
  double s = cont_first_moment(a, b);
  for (const auto& at : d_->atoms)
    if (at.size >= a && at.size < b) s += at.mass * at.size;
  return s;
}

double LevyMeasure::log_moment() const {
  double s = 0;
  for (const auto& a : d_->atoms)
    if (a.size >= 1) s += a.mass * std::log(a.size);
  const Data& d = *d_;
  if (d.kind == LevyKind::none) return s;
  if (std::isinf(d.cut)) {
    if (d.kind == LevyKind::power_tail) return s + d.scale / (d.alpha * d.alpha);
    if (d.kind == LevyKind::log_tail) {
      if (d.beta <= 1) return kInf;
      double l2 = std::log(2.0);
      return s + d.alpha / (d.beta * (d.beta - 1) * std::pow(l2, d.beta - 1)) +
             raw_tail(2.0) * l2;
    }
  }
  // integral of T(x)/x over [1, support_max): in log variable, T(e^u)
  double top = support_max();
  if (top <= 1) return s;
  auto f = [&](double u) { return cont_tail(std::exp(u)); };
  if (std::isinf(top)) {
    IntegralVerdict v = probe_improper([&](double x) { return cont_tail(x) / x; },
                                       SingularEnd::upper, 1.0);
    if (v.diverges()) return kInf;
    return s + v.value;
  }
  return s + integrate_gk(f, 0.0, std::log(top));
}

double LevyMeasure::cont_levy_integral(double z) const {
  const Data& d = *d_;
  if (d.kind == LevyKind::none || z == 0) return 0.0;
  if (d.kind == LevyKind::power_tail && std::isinf(d.cut) && d.alpha != 1.0) {
    double g = boost::math::tgamma(-d.alpha);
    return d.scale * (g * std::pow(z, d.alpha) + z / (1 - d.alpha));
  }
  // tail representation:
  //   int_0^{1} z(1-e^{-zx})(T(x)-T(1)) dx + (e^{-z}-1) T(1) - int_1^cut z e^{-zx} T(x) dx
  double top = support_max();
  double T1 = cont_tail(1.0);
  double part1 = 0.0;
  double up1 = std::min(1.0, top);
  if (up1 > 0) {
    auto f = [&](double s) {
      double x = std::exp(s);
      double w = cont_tail(x) - T1;
      if (w == 0) return 0.0;
      return -std::expm1(-z * x) * z * w * x;
    };
    double s_hi = std::log(up1);
    double s_lo = std::min(s_hi, -std::log(z)) - 200.0;
    if (d.kind == LevyKind::log_tail) s_lo = s_hi;  // T(x) - T(1) vanishes below 1
    if (d.kind == LevyKind::tabulated && d.grid.front() > 0) {
      // T is flat below the first node: int_0^a z (1 - e^{-zx}) dx = za + e^{-za} - 1
      double a = std::min(d.grid.front(), up1);
      part1 += (cont_tail(a) - T1) * (z * a + std::expm1(-z * a));
      s_lo = std::log(a);
    }
    if (s_hi > s_lo) part1 += integrate_gk(f, s_lo, s_hi, 1e-12, nullptr, 15);
  }
  double part2 = std::expm1(-z) * T1;
  double part3 = 0.0;
  if (top > 1) {
    double s_hi = std::min(std::log(top), std::log(750.0 / z + 1.0));
    auto f = [&](double s) {
      double x = std::exp(s);
      return z * std::exp(-z * x) * cont_tail(x) * x;
    };
    if (s_hi > 0) {
      // split at the peak of the exponential weight and at kinks of the tail
      std::vector<double> cuts{0.0, std::clamp(-std::log(z), 0.0, s_hi), s_hi};
      if (d.kind == LevyKind::log_tail && std::log(2.0) < s_hi) cuts.push_back(std::log(2.0));
      if (d.kind == LevyKind::tabulated)
        for (double g : {d.grid.front(), d.grid.back()})
          if (g > 1 && std::log(g) < s_hi) cuts.push_back(std::log(g));
      std::sort(cuts.begin(), cuts.end());
      for (size_t i = 0; i + 1 < cuts.size(); ++i)
        part3 += integrate_gk(f, cuts[i], cuts[i + 1], 1e-12, nullptr, 15);
    }
  }
  return part1 + part2 - part3;
}

double LevyMeasure::levy_integral(double z) const {
  double s = cont_levy_integral(z);
  for (const auto& a : d_->atoms) {
    if (a.mass == 0) continue;
    double v = std::expm1(-z * a.size);
    if (a.size <= 1) v += z * a.size;
    s += a.mass * v;
  }
  return s;
}

bool LevyMeasure::operator==(const LevyMeasure& o) const {
  const Data &a = *d_, &b = *o.d_;
  if (a.kind != b.kind || a.cut != b.cut || a.atoms != b.atoms) return false;
  switch (a.kind) {
    case LevyKind::none: return true;
    case LevyKind::power_tail: return a.alpha == b.alpha && a.scale == b.scale;
    case LevyKind::log_tail: return a.alpha == b.alpha && a.beta == b.beta;
    case LevyKind::tabulated: return a.grid == b.grid && a.density == b.density;
    case LevyKind::user_tail: return d_ == o.d_;
  }
  return false;
}

}  // namespace lcsbp
