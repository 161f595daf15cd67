#pragma once

#include <vector>

#include "lcsbp/mechanism.hpp"

namespace lcsbp {

/// Q(x) = (2/c) int_1^x Psi(u)/u du on a log-spaced grid, interpolated by
/// cubic Hermite in s = log x using the exact slope (2/c) Psi(e^s).
/// Values outside the grid fall back to direct quadrature.
class QTable {
 public:
  explicit QTable(const MechanismSpec& spec, int octaves = 128, int per_octave = 16);

  /// (2/c) int_1^x Psi(u)/u du
  double q1(double x) const;
  /// (2/c) int_theta^x Psi(u)/u du
  double q(double x, double theta) const { return q1(x) - q1(theta); }

  /// Local bound on the cubic interpolation error of q1 near x; zero off the grid.
  double interp_error(double x) const;

  const MechanismSpec& spec() const { return spec_; }
  double x_min() const;
  double x_max() const;

 private:
  MechanismSpec spec_;
  double s0_ = 0, h_ = 0;
  std::vector<double> val_, der_;
};

}  // namespace lcsbp
