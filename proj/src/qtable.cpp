#include "lcsbp/qtable.hpp"

#include <algorithm>
#include <cmath>

namespace lcsbp {

QTable::QTable(const MechanismSpec& spec, int octaves, int per_octave) : spec_(spec) {
  h_ = std::log(2.0) / per_octave;
  int half = octaves * per_octave;
  int n = 2 * half + 1;
  s0_ = -half * h_;
  val_.assign(n, 0.0);
  der_.assign(n, 0.0);
  const double k = 2.0 / spec.c;
  // two guard nodes at each end feed the six-point rule below
  std::vector<double> f(n + 4);
  for (int i = 0; i < n + 4; ++i) f[i] = k * eval_psi(spec, std::exp(s0_ + (i - 2) * h_));
  for (int i = 0; i < n; ++i) der_[i] = f[i + 2];
  // slope is analytic in s; integrate each segment with the degree-5
  // interpolant through the six surrounding nodes
  std::vector<double> seg(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double* g = &f[i];  // g[2] is node i
    seg[i] = h_ * (11 * g[0] - 93 * g[1] + 802 * g[2] + 802 * g[3] - 93 * g[4] + 11 * g[5]) / 1440.0;
  }
  // cumulative from the node at s = 0 (x = 1)
  for (int i = half + 1; i < n; ++i) val_[i] = val_[i - 1] + seg[i - 1];
  for (int i = half - 1; i >= 0; --i) val_[i] = val_[i + 1] - seg[i];
}

double QTable::x_min() const { return std::exp(s0_); }
double QTable::x_max() const { return std::exp(s0_ + (val_.size() - 1) * h_); }

double QTable::interp_error(double x) const {
  double pos = (std::log(x) - s0_) / h_;
  int n = static_cast<int>(val_.size());
  if (!(pos >= 0) || pos > n - 1) return 0.0;
  int i = std::clamp(static_cast<int>(pos), 1, n - 3);
  // h^4/384 |Q| with Q from the third difference of the slopes
  double d3 = der_[i + 2] - 3 * der_[i + 1] + 3 * der_[i] - der_[i - 1];
  return h_ * std::fabs(d3) / 384.0;
}

double QTable::q1(double x) const {
  double s = std::log(x);
  double pos = (s - s0_) / h_;
  int n = static_cast<int>(val_.size());
  const double k = 2.0 / spec_.c;
  if (pos < 0) {
    return val_.front() - k * eval_psi_over_u_integral(spec_, x, x_min());
  }
  if (pos > n - 1) {
    return val_.back() + k * eval_psi_over_u_integral(spec_, x_max(), x);
  }
  int i = std::min(static_cast<int>(pos), n - 2);
  double t = pos - i;
  double t2 = t * t, t3 = t2 * t;
  double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * val_[i] + h10 * h_ * der_[i] + h01 * val_[i + 1] + h11 * h_ * der_[i + 1];
}

}  // namespace lcsbp
