#include "lcsbp/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace lcsbp {

const char* to_string(Absorption a) {
  switch (a) {
    case Absorption::zero: return "zero";
    case Absorption::infinity: return "infinity";
    default: return "none";
  }
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// expm1(x)/x and log1p(x)/x, both 1 at x = 0
double expm1_over(double x) { return std::fabs(x) < 1e-12 ? 1.0 + 0.5 * x : std::expm1(x) / x; }
double log1p_over(double x) { return std::fabs(x) < 1e-12 ? 1.0 - 0.5 * x : std::log1p(x) / x; }

// Jump and Gaussian data of the Levy process driving R.
struct DrivingModel {
  double a = 0.5;        // c/2
  double s2 = 0.0;       // sigma^2 plus the small-jump variance
  double drift = 0.0;    // -gamma minus the compensator of the simulated jumps
  double lambda = 0.0;
  double cont_rate = 0.0;
  double rate = 0.0;     // all simulated jumps
  std::vector<Atom> atoms;
  std::vector<double> atom_cum;
  LevyMeasure levy;

  double sample_jump(Rng& rng) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u = u01(rng) * rate;
    if (u < cont_rate) {
      double t = std::max(u, std::numeric_limits<double>::min());
      return levy.cont_inverse_tail(t);
    }
    u -= cont_rate;
    auto it = std::upper_bound(atom_cum.begin(), atom_cum.end(), u);
    size_t i = std::min<size_t>(it - atom_cum.begin(), atoms.size() - 1);
    return atoms[i].size;
  }
};

DrivingModel build_model(const MechanismSpec& spec, const SimConfig& cfg) {
  validate(spec);
  DrivingModel m;
  m.a = 0.5 * spec.c;
  m.lambda = spec.lambda;
  m.levy = spec.levy;
  double comp = 0.0;
  for (const Atom& at : spec.levy.atom_list()) {
    if (!(at.mass > 0)) continue;
    m.atoms.push_back(at);
    m.atom_cum.push_back((m.atom_cum.empty() ? 0.0 : m.atom_cum.back()) + at.mass);
    if (at.size <= 1.0) comp += at.mass * at.size;
  }
  double small_var = 0.0;
  if (spec.levy.has_continuous()) {
    double atom_mass = m.atom_cum.empty() ? 0.0 : m.atom_cum.back();
    double cont_mass = spec.levy.kind() == LevyKind::power_tail ? kInf : spec.levy.total_mass() - atom_mass;
    double eps = cfg.jump_cutoff;
    if (!(eps > 0)) eps = cont_mass <= cfg.max_jump_rate ? 0.0 : spec.levy.cont_inverse_tail(cfg.max_jump_rate);
    m.cont_rate = eps > 0 ? spec.levy.cont_tail(eps) : cont_mass;
    if (eps > 0) small_var = spec.levy.cont_second_moment_below(eps);
    // jumps in [eps, 1] are compensated; jumps in [1, eps) enter the Gaussian uncompensated
    comp += eps < 1.0 ? spec.levy.cont_first_moment(eps, 1.0) : -spec.levy.cont_first_moment(1.0, eps);
  }
  m.rate = m.cont_rate + (m.atom_cum.empty() ? 0.0 : m.atom_cum.back());
  m.s2 = spec.sigma * spec.sigma + small_var;
  m.drift = -spec.gamma - comp;
  if (!std::isfinite(m.rate) || !std::isfinite(m.drift) || !std::isfinite(m.s2))
    throw std::invalid_argument("jump model is not finite; set a positive jump cutoff");
  return m;
}

std::vector<double> output_grid(const SimConfig& cfg) {
  std::vector<double> g = cfg.grid;
  if (g.empty() && std::isfinite(cfg.t_max)) g.push_back(cfg.t_max);
  std::sort(g.begin(), g.end());
  for (double t : g)
    if (!(t >= 0)) throw std::invalid_argument("grid times must be >= 0");
  return g;
}

void check_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be > 0");
  if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (!(cfg.t_max > 0)) throw std::invalid_argument("t_max must be > 0");
  if (cfg.jump_cutoff < 0) throw std::invalid_argument("jump cutoff must be >= 0");
}

enum class Clock { r, z };

// One path of R, reported either in its own clock or through the time change.
class RPath {
 public:
  RPath(const DrivingModel& m, const SimConfig& cfg, Clock clk, Rng& rng)
      : m_(m), cfg_(cfg), clk_(clk), rng_(rng), exp1_(1.0) {}

  PathRecord run(double z0) {
    if (!(z0 >= 0) || !std::isfinite(z0)) throw std::invalid_argument("start must be finite and >= 0");
    rec_.times = output_grid(cfg_);
    rec_.values.assign(rec_.times.size(), kNaN);
    if (clk_ == Clock::z) rec_.clock.assign(rec_.times.size(), kNaN);
    std::vector<double> lv = cfg_.levels;
    std::sort(lv.begin(), lv.end(), std::greater<>());
    for (double a : lv) {
      if (z0 <= a) {
        rec_.first_passage[a] = 0.0;
        if (clk_ == Clock::z) rec_.progeny[a] = 0.0;
      } else {
        rec_.first_passage[a] = std::nullopt;
        if (clk_ == Clock::z) rec_.progeny[a] = std::nullopt;
        pending_.push_back(a);
      }
    }
    ph_ = cfg_.progeny_dt > 0 ? cfg_.progeny_dt : cfg_.dt;
    p_last_z_ = z0;
    R_ = z0;
    if (z0 == 0) {
      if (clk_ == Clock::z || cfg_.stop_at_zero) {
        absorb(Absorption::zero, 0.0, 0.0);
        return std::move(rec_);
      }
    }
    s_jump_ = m_.rate > 0 ? exp1_(rng_) / m_.rate : kInf;
    s_kill_ = m_.lambda > 0 ? exp1_(rng_) / m_.lambda : kInf;
    if (m_.s2 == 0) run_flow();
    else run_stochastic();
    return std::move(rec_);
  }

 private:
  const DrivingModel& m_;
  const SimConfig& cfg_;
  Clock clk_;
  Rng& rng_;
  std::exponential_distribution<double> exp1_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> u01_{0.0, 1.0};
  PathRecord rec_;
  size_t gi_ = 0;
  std::vector<double> pending_;  // levels not yet reached, highest first
  double s_ = 0, th_ = 0, R_ = 0;
  double s_jump_ = kInf, s_kill_ = kInf;
  // Z-time samples for progeny integrals
  double ph_ = 0.01, p_last_t_ = 0.0, p_last_z_ = 0.0, p_acc_ = 0.0;

  double now() const { return clk_ == Clock::r ? s_ : th_; }
  // the R-time budget only bounds runs with an infinite horizon
  double r_cap() const { return std::isfinite(cfg_.t_max) ? kInf : cfg_.r_time_cap; }

  // Grid values for times in [t0, t1) of the reporting clock.
  template <class ValueFn, class ClockFn>
  void emit(double t1, ValueFn value, ClockFn clock) {
    double t0 = now();
    while (gi_ < rec_.times.size() && rec_.times[gi_] < t1) {
      double d = std::max(rec_.times[gi_] - t0, 0.0);
      rec_.values[gi_] = value(d);
      if (clk_ == Clock::z) rec_.clock[gi_] = clock(d);
      ++gi_;
    }
  }

  // Progeny samples on the uniform Z-time grid strictly before t1.
  template <class ValueFn>
  void progeny_to(double t1, ValueFn value) {
    if (clk_ != Clock::z || pending_.empty()) return;
    double t0 = th_;
    for (double t = p_last_t_ + ph_; t < t1; t = p_last_t_ + ph_) {
      double z = value(std::max(t - t0, 0.0));
      p_acc_ += 0.5 * ph_ * (p_last_z_ + z);
      p_last_t_ = t;
      p_last_z_ = z;
    }
  }

  void reach_level(double a, double when) {
    rec_.first_passage[a] = when;
    if (clk_ == Clock::z) rec_.progeny[a] = p_acc_ + 0.5 * (when - p_last_t_) * (p_last_z_ + a);
    pending_.erase(std::find(pending_.begin(), pending_.end(), a));
  }

  void absorb(Absorption where, double when, double value) {
    rec_.absorbed_at = where;
    rec_.absorption_time = when;
    for (; gi_ < rec_.times.size(); ++gi_) {
      if (rec_.times[gi_] < when) continue;  // left unset only if the step skipped it
      rec_.values[gi_] = value;
      if (clk_ == Clock::z) rec_.clock[gi_] = s_;
    }
  }

  bool horizon_reached() const {
    if (clk_ == Clock::r) return s_ >= cfg_.t_max;
    return th_ >= cfg_.t_max || s_ >= r_cap();
  }

  // Jump or killing at the current R-time; returns false when the path ended.
  bool apply_event() {
    if (s_ >= s_kill_) {
      rec_.killed = true;
      absorb(Absorption::infinity, now(), kInf);
      return false;
    }
    if (s_ >= s_jump_) {
      R_ += m_.sample_jump(rng_);
      s_jump_ = s_ + exp1_(rng_) / m_.rate;
      if (!(R_ < cfg_.explosion_level)) {
        absorb(Absorption::infinity, now(), kInf);
        return false;
      }
    }
    return true;
  }

  // No Gaussian part: R follows mu + D e^{-a u} between jumps, with exact clock.
  void run_flow() {
    const double a = m_.a, mu = m_.drift / a;
    for (;;) {
      double s_evt = std::min(s_jump_, s_kill_);
      double s_lim = clk_ == Clock::r ? std::min(s_evt, cfg_.t_max) : std::min(s_evt, r_cap());
      double u_evt = s_lim - s_;
      double D = R_ - mu, R0 = R_;
      bool stops = clk_ == Clock::z || cfg_.stop_at_zero;
      double u0 = (mu < 0 && R0 > 0) ? std::log(D / -mu) / a : kInf;  // R reaches 0
      double u_end = stops ? std::min(u_evt, u0) : u_evt;
      auto r_at = [&](double u) { return mu + D * std::exp(-a * u); };
      // Z-time elapsed after R-time u, and its inverse
      auto theta_of = [&](double u) {
        if (u >= u0) return kInf;
        double x = std::expm1(a * u) / R0;
        return x * log1p_over(mu * x) / a;
      };
      auto growth = [&](double d) { return R0 * a * d * expm1_over(a * mu * d); };
      auto z_at = [&](double d) { return mu + D / (1.0 + growth(d)); };
      auto clock_at = [&](double d) { return s_ + std::log1p(growth(d)) / a; };

      // downward level crossings inside the piece
      while (!pending_.empty()) {
        double lvl = pending_.front();
        if (!(lvl > mu) || lvl >= R0) {
          if (lvl >= R0) reach_level(lvl, now());  // can only happen after rounding
          else break;
          continue;
        }
        double u_a = std::log(D / (lvl - mu)) / a;
        if (u_a > u_end) break;
        if (clk_ == Clock::r) {
          if (s_ + u_a > cfg_.t_max) break;
          reach_level(lvl, s_ + u_a);
        } else {
          double t_a = th_ + theta_of(u_a);
          if (t_a > cfg_.t_max) break;
          progeny_to(t_a, z_at);
          reach_level(lvl, t_a);
        }
      }

      if (clk_ == Clock::r) {
        double s_end = s_ + u_end;
        bool last = s_end >= cfg_.t_max;
        emit(last ? std::nextafter(cfg_.t_max, kInf) : s_end, [&](double d) { return r_at(d); },
             [](double) { return 0.0; });
        if (u_end == u0 && u0 <= u_evt) {
          s_ = s_end;
          rec_.r_zero_time = s_;
          absorb(Absorption::zero, s_, 0.0);
          return;
        }
        s_ = s_end;
        R_ = r_at(u_end);
        if (last || s_ >= cfg_.t_max) return;
      } else {
        double L = theta_of(u_end);
        double t_end = th_ + L;
        bool last = t_end >= cfg_.t_max;
        progeny_to(last ? cfg_.t_max : t_end, z_at);
        emit(last ? std::nextafter(cfg_.t_max, kInf) : t_end, z_at, clock_at);
        if (u_end == u0 && u0 <= u_evt) {
          // the clock diverges: Z only tends to 0
          rec_.r_zero_time = s_ + u0;
          return;
        }
        if (last) return;
        th_ = t_end;
        s_ += u_end;
        R_ = r_at(u_end);
        if (s_ >= r_cap()) return;
      }
      if (!apply_event()) return;
    }
  }

  double next_grid_after(double s) const {
    auto it = std::upper_bound(rec_.times.begin(), rec_.times.end(), s);
    return it == rec_.times.end() ? kInf : *it;
  }

  void run_stochastic() {
    const double a = m_.a, c = 2 * a;
    const bool stops = clk_ == Clock::z || cfg_.stop_at_zero;
    // R-clock grid points at time 0
    if (clk_ == Clock::r)
      while (gi_ < rec_.times.size() && rec_.times[gi_] <= 0) rec_.values[gi_++] = R_;
    for (;;) {
      if (horizon_reached()) return;
      if (clk_ == Clock::z && R_ < 1e-250) {
        rec_.degraded = true;
        absorb(Absorption::zero, th_, 0.0);
        return;
      }
      double ds = cfg_.dt;
      if (clk_ == Clock::z) {
        ds = std::min(ds, cfg_.dt * R_);
        ds = std::min(ds, r_cap() - s_);
      } else {
        ds = std::min({ds, cfg_.t_max - s_, next_grid_after(s_) - s_});
      }
      ds = std::min({ds, s_jump_ - s_, s_kill_ - s_});
      ds = std::max(ds, 0.0);
      // land exactly on the event, grid or horizon time that limited the step
      double s_next = s_ + ds;
      for (double target : {s_jump_, s_kill_, clk_ == Clock::r ? next_grid_after(s_) : kInf,
                            clk_ == Clock::r ? cfg_.t_max : r_cap()})
        if (target - s_ <= ds) s_next = std::max(s_next, target);
      double e1 = std::exp(-a * ds);
      double mean = R_ * e1 - (m_.drift / a) * std::expm1(-a * ds);
      double var = -m_.s2 * std::expm1(-c * ds) / c;
      double R1 = mean + std::sqrt(var) * normal_(rng_);
      const double R0 = R_;

      // crossings of pending levels and of zero, highest first
      double from = R0, tau_from = 0.0;
      bool hit_zero = false;
      double zero_tau = 0.0;
      std::vector<std::pair<double, double>> crossed;  // (level, tau)
      for (size_t j = 0;;) {
        bool have_level = j < pending_.size() && (!stops || pending_[j] > 0);
        if (!have_level && !stops) break;
        double b = have_level ? pending_[j] : 0.0;
        double frac = ds > 0 ? (ds - tau_from) / ds : 0.0;
        bool cross = R1 <= b;
        if (!cross && var > 0 && frac > 0) cross = u01_(rng_) < std::exp(-2.0 * (from - b) * (R1 - b) / (var * frac));
        if (!cross) break;
        double rel = R1 <= b ? (from - b) / (from - R1) : (from - b) / ((from - b) + (R1 - b));
        double tau = tau_from + rel * (ds - tau_from);
        if (have_level) {
          crossed.emplace_back(b, tau);
          from = b;
          tau_from = tau;
          ++j;
          continue;
        }
        hit_zero = true;
        zero_tau = tau;
        if (j < pending_.size() && pending_[j] == 0) crossed.emplace_back(0.0, tau);
        break;
      }

      // clock over [0, tau] with R linear from R0 to v at tau
      auto theta_lin = [&](double tau, double v) {
        if (tau <= 0) return 0.0;
        if (v <= 0) return tau / R0;
        if (std::fabs(v - R0) <= 1e-12 * R0) return tau / R0;
        return tau * std::log(v / R0) / (v - R0);
      };
      double end_tau = hit_zero ? zero_tau : ds;
      double end_val = hit_zero ? 0.0 : R1;
      double dtheta = clk_ == Clock::z ? theta_lin(end_tau, end_val) : 0.0;

      if (clk_ == Clock::z) {
        // Z between the step ends: R linear in R-time gives R0 e^{k d} in Z-time
        double k = end_tau > 0 ? (end_val - R0) / end_tau : 0.0;
        auto z_at = [&](double d) {
          if (hit_zero) return std::max(R0 * (1.0 - d / std::max(dtheta, 1e-300)), 0.0);
          return R0 * std::exp(k * d);
        };
        auto clock_at = [&](double d) {
          double v = z_at(d);
          return k != 0 ? s_ + (v - R0) / k : s_ + R0 * d;
        };
        for (auto [b, tau] : crossed) {
          double t_b = th_ + theta_lin(tau, b);
          if (t_b > cfg_.t_max) break;
          progeny_to(t_b, z_at);
          reach_level(b, t_b);
        }
        double t_end = th_ + dtheta;
        bool last = t_end >= cfg_.t_max;
        progeny_to(last ? cfg_.t_max : t_end, z_at);
        emit(last ? std::nextafter(cfg_.t_max, kInf) : t_end, z_at, clock_at);
        if (hit_zero) {
          s_ += zero_tau;
          th_ = t_end;
          rec_.r_zero_time = s_;
          absorb(Absorption::zero, th_, 0.0);
          return;
        }
        th_ = t_end;
        s_ = s_next;
        R_ = R1;
        if (last) return;
      } else {
        for (auto [b, tau] : crossed) reach_level(b, s_ + tau);
        if (hit_zero) {
          s_ += zero_tau;
          R_ = 0.0;
          absorb(Absorption::zero, s_, 0.0);
          return;
        }
        s_ = s_next;
        R_ = R1;
        if (s_ >= s_jump_ || s_ >= s_kill_) {
          if (!apply_event()) return;
        }
        while (gi_ < rec_.times.size() && rec_.times[gi_] <= s_ * (1 + 1e-15)) rec_.values[gi_++] = R_;
        continue;
      }
      if (s_ >= s_jump_ || s_ >= s_kill_) {
        if (!apply_event()) return;
      }
    }
  }
};

// Diffusion U: exact square-root step split around an implicit drift step.
class UPath {
 public:
  UPath(const MechanismSpec& spec, UMode mode, const SimConfig& cfg, Rng& rng)
      : spec_(spec), mode_(mode), cfg_(cfg), rng_(rng) {
    dim_ = 4.0 * spec.lambda / spec.c;
    no_drift_ = spec.sigma == 0 && spec.gamma == 0 && spec.levy.is_zero();
  }

  PathRecord run(double x0) {
    if (!(x0 >= 0) || !std::isfinite(x0)) throw std::invalid_argument("x0 must be finite and >= 0");
    PathRecord rec;
    rec.times = output_grid(cfg_);
    rec.values.assign(rec.times.size(), kNaN);
    size_t gi = 0;
    double t = 0.0, v = x0;
    bool absorbing = mode_ == UMode::absorb_at_zero;
    auto finish_zero = [&](double when) {
      rec.absorbed_at = Absorption::zero;
      rec.absorption_time = when;
      for (; gi < rec.times.size(); ++gi) rec.values[gi] = 0.0;
    };
    while (gi < rec.times.size() && rec.times[gi] <= 0) rec.values[gi++] = v;
    if (absorbing && v == 0) {
      finish_zero(0.0);
      return rec;
    }
    const double t_end = rec.times.empty() ? cfg_.t_max : std::min(cfg_.t_max, rec.times.back());
    while (t < t_end) {
      double h = std::min(cfg_.dt, t_end - t);
      if (gi < rec.times.size()) h = std::min(h, rec.times[gi] - t);
      if (!(h > 0)) h = std::min(cfg_.dt, t_end - t);
      v = drift(v, 0.5 * h);
      v = sqrt_step(v, h);
      v = drift(v, 0.5 * h);
      t += h;
      if (absorbing && v < 1e-14) {
        finish_zero(t);
        return rec;
      }
      if (!std::isfinite(v)) {
        rec.absorbed_at = Absorption::infinity;
        rec.absorption_time = t;
        for (; gi < rec.times.size(); ++gi) rec.values[gi] = kInf;
        return rec;
      }
      while (gi < rec.times.size() && rec.times[gi] <= t * (1 + 1e-15)) rec.values[gi++] = v;
    }
    return rec;
  }

 private:
  const MechanismSpec& spec_;
  UMode mode_;
  const SimConfig& cfg_;
  Rng& rng_;
  double dim_ = 0.0;
  bool no_drift_ = false;
  std::uniform_real_distribution<double> u01_{0.0, 1.0};

  // Psi + lambda, which vanishes at 0
  double psi0(double v) const { return v <= 0 ? 0.0 : eval_psi(spec_, v) + spec_.lambda; }

  double uniform() {
    double u;
    do u = u01_(rng_);
    while (u <= 0.0 || u >= 1.0);
    return u;
  }

  double gamma_draw(double shape, double scale) {
    if (shape <= 0) return 0.0;
    if (cfg_.coupled) return scale * boost::math::gamma_p_inv(shape, uniform());
    std::gamma_distribution<double> g(shape, scale);
    return g(rng_);
  }

  double poisson_draw(double mean) {
    if (mean <= 0) return 0.0;
    if (cfg_.coupled) {
      using namespace boost::math::policies;
      using Pol = policy<discrete_quantile<integer_round_down>>;
      return boost::math::quantile(boost::math::poisson_distribution<double, Pol>(mean), uniform());
    }
    if (mean > 1e15) return std::round(mean + std::sqrt(mean) * std::normal_distribution<double>()(rng_));
    std::poisson_distribution<long long> p(mean);
    return static_cast<double>(p(rng_));
  }

  // dV = sqrt(c V) dB + lambda dt over h
  double sqrt_step(double v, double h) {
    const double scale = 0.5 * spec_.c * h;
    const double m = v / scale;
    if (mode_ == UMode::absorb_at_zero && dim_ < 2.0) {
      if (v <= 0) return 0.0;
      double g = gamma_draw(1.0 - 0.5 * dim_, 1.0);
      if (g >= m) return 0.0;
      double k = poisson_draw(m - g);
      return gamma_draw(k + 1.0, scale);
    }
    double n = poisson_draw(m);
    return gamma_draw(n + 0.5 * dim_, scale);
  }

  // dV = -(Psi(V) + lambda) dt over tau by the implicit trapezoid rule
  double drift(double v, double tau, int depth = 0) {
    if (no_drift_ || v <= 0 || tau <= 0) return v;
    double p0 = psi0(v);
    double r = v - 0.5 * tau * p0;
    auto g = [&](double w) { return w + 0.5 * tau * psi0(w) - r; };
    if (r > 0 && depth < 30) {
      double hi = std::max(v, r);
      int it = 0;
      while (g(hi) < 0 && it++ < 60) hi *= 2;
      if (g(hi) >= 0 && std::isfinite(hi)) {
        boost::uintmax_t max_iter = 100;
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        try {
          auto br = boost::math::tools::toms748_solve(g, 0.0, hi, -r, g(hi), tol, max_iter);
          return 0.5 * (br.first + br.second);
        } catch (const std::exception&) {
        }
      }
    }
    if (depth >= 30) return std::max(v - tau * p0, 0.0);
    // no bracket: two half steps
    return drift(drift(v, 0.5 * tau, depth + 1), 0.5 * tau, depth + 1);
  }
};

}  // namespace

Rng path_rng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return splitmix64(seed ^ splitmix64(tag)); }

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 16));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t lo = next.fetch_add(chunk);
        if (lo >= n) return;
        std::size_t hi = std::min(n, lo + chunk);
        try {
          for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          next = n;
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

PathRecord simulate_ou_path(const MechanismSpec& spec, double z0, const SimConfig& cfg, std::uint64_t index) {
  check_config(cfg);
  if (!std::isfinite(cfg.t_max)) throw std::invalid_argument("the OU horizon must be finite");
  DrivingModel m = build_model(spec, cfg);
  Rng rng = path_rng(cfg.seed, index);
  return RPath(m, cfg, Clock::r, rng).run(z0);
}

PathRecord simulate_zmin_path(const MechanismSpec& spec, double z0, const SimConfig& cfg, std::uint64_t index) {
  check_config(cfg);
  DrivingModel m = build_model(spec, cfg);
  Rng rng = path_rng(cfg.seed, index);
  return RPath(m, cfg, Clock::z, rng).run(z0);
}

PathRecord simulate_u_path(const MechanismSpec& spec, double x0, UMode mode, const SimConfig& cfg,
                           std::uint64_t index) {
  check_config(cfg);
  validate(spec);
  if (!std::isfinite(cfg.t_max)) throw std::invalid_argument("the U horizon must be finite");
  if (mode == UMode::entrance && 2 * spec.lambda / spec.c < 1)
    throw std::invalid_argument("entrance mode needs 2 lambda / c >= 1");
  Rng rng = path_rng(cfg.seed, index);
  return UPath(spec, mode, cfg, rng).run(x0);
}

std::vector<PathRecord> simulate_ou(const MechanismSpec& spec, double z0, const SimConfig& cfg) {
  check_config(cfg);
  if (!std::isfinite(cfg.t_max)) throw std::invalid_argument("the OU horizon must be finite");
  DrivingModel m = build_model(spec, cfg);
  std::vector<PathRecord> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    Rng rng = path_rng(cfg.seed, i);
    out[i] = RPath(m, cfg, Clock::r, rng).run(z0);
  });
  return out;
}

std::vector<PathRecord> simulate_zmin(const MechanismSpec& spec, double z0, const SimConfig& cfg) {
  check_config(cfg);
  DrivingModel m = build_model(spec, cfg);
  std::vector<PathRecord> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    Rng rng = path_rng(cfg.seed, i);
    out[i] = RPath(m, cfg, Clock::z, rng).run(z0);
  });
  return out;
}

std::vector<PathRecord> simulate_zk(const MechanismSpec& spec, double k, double z0, const SimConfig& cfg) {
  if (!(k > 0)) throw std::invalid_argument("k must be > 0");
  return simulate_zmin(truncate(spec, k), z0, cfg);
}

std::vector<PathRecord> simulate_u(const MechanismSpec& spec, double x0, UMode mode, const SimConfig& cfg) {
  check_config(cfg);
  validate(spec);
  if (!std::isfinite(cfg.t_max)) throw std::invalid_argument("the U horizon must be finite");
  if (mode == UMode::entrance && 2 * spec.lambda / spec.c < 1)
    throw std::invalid_argument("entrance mode needs 2 lambda / c >= 1");
  std::vector<PathRecord> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t i) {
    Rng rng = path_rng(cfg.seed, i);
    out[i] = UPath(spec, mode, cfg, rng).run(x0);
  });
  return out;
}

double value_at(const PathRecord& p, double t) {
  if (p.times.empty()) throw std::invalid_argument("path has no output times");
  double tol = 1e-12 * std::max(1.0, std::fabs(t));
  if (t > p.times.back() + tol) throw std::out_of_range("time beyond the simulated horizon");
  auto it = std::upper_bound(p.times.begin(), p.times.end(), t + tol);
  if (it == p.times.begin()) throw std::out_of_range("time before the first output time");
  return p.values[(it - p.times.begin()) - 1];
}

Estimate mc_mean(const std::vector<PathRecord>& paths, const std::function<double(const PathRecord&)>& f) {
  Estimate e;
  e.n = paths.size();
  if (paths.empty()) return e;
  std::vector<double> v(paths.size());
  for (size_t i = 0; i < paths.size(); ++i) v[i] = f(paths[i]);
  double sum = 0.0;
  for (double x : v) sum += x;
  e.mean = sum / v.size();
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / (v.size() - 1) / v.size());
  }
  return e;
}

Estimate mc_laplace(const std::vector<PathRecord>& paths, double x, double t) {
  if (!(x >= 0)) throw std::invalid_argument("x must be >= 0");
  if (x == 0) return {1.0, 0.0, paths.size()};
  return mc_mean(paths, [&](const PathRecord& p) {
    double v = value_at(p, t);
    if (std::isnan(v)) throw std::runtime_error("path value missing at requested time");
    if (std::isinf(v)) return v > 0 ? 0.0 : kInf;
    if (std::isinf(x)) return v == 0 ? 1.0 : 0.0;
    return std::exp(-x * v);
  });
}

}  // namespace lcsbp
