#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace lcsbp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Continuous part of a jump measure; atoms are kept separately.
enum class LevyKind { none, power_tail, log_tail, tabulated, user_tail };

struct Atom {
  double size = 0.0;
  double mass = 0.0;
  bool operator==(const Atom&) const = default;
};

/// Jump measure pi on (0, inf): an optional continuous part restricted to
/// (0, cut) plus a finite list of atoms.
///
/// power_tail:  density scale * x^(-1-alpha), alpha in (0,2)
/// log_tail:    density alpha / (x (log x)^(beta+1)) on x >= 2
/// tabulated:   piecewise-linear density on a grid, zero outside it
/// user_tail:   tail function x -> pi([x,inf)) with a second-moment callable
class LevyMeasure {
 public:
  LevyMeasure();

  static LevyMeasure null_measure();
  static LevyMeasure atoms(std::vector<Atom> atoms);
  static LevyMeasure power_tail(double alpha, double scale);
  static LevyMeasure log_tail(double alpha, double beta);
  static LevyMeasure tabulated(std::vector<double> grid, std::vector<double> density);
  static LevyMeasure user_tail(std::function<double(double)> tail,
                               std::function<double(double)> second_moment_below,
                               std::string label = "user");

  LevyKind kind() const;
  double alpha() const;
  double beta() const;
  double scale() const;
  const std::vector<double>& grid() const;
  const std::vector<double>& density() const;
  const std::string& label() const;
  double cut() const;
  const std::vector<Atom>& atom_list() const;

  /// pi restricted to (0, k).
  LevyMeasure restricted(double k) const;
  LevyMeasure with_atom(Atom a) const;

  bool is_zero() const;
  bool has_continuous() const;

  /// pi([x, inf)) for x > 0.
  double tail(double x) const;
  /// pi((0, inf)); +inf for infinite-activity measures.
  double total_mass() const;
  /// Integral of x^2 over (0, eps).
  double second_moment_below(double eps) const;
  /// Integral of x over [a, b); may be +inf when a -> 0.
  double first_moment(double a, double b) const;
  /// Integral of log(x) over [1, inf); +inf when divergent.
  double log_moment() const;
  /// Integral of (e^{-zx} - 1 + zx 1{x<=1}) over pi.
  double levy_integral(double z) const;

  /// Tail of the continuous part alone (restricted to (0,cut)).
  double cont_tail(double x) const;
  /// Inverse of cont_tail: smallest x with cont_tail(x) <= t.
  double cont_inverse_tail(double t) const;
  double cont_second_moment_below(double eps) const;
  double cont_first_moment(double a, double b) const;

  bool operator==(const LevyMeasure& o) const;

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
  explicit LevyMeasure(std::shared_ptr<const Data> d);
  double raw_tail(double x) const;
  double raw_m2(double eps) const;
  double raw_m1(double a, double b) const;
  double raw_inverse_tail(double t) const;
  double support_max() const;
  double cont_levy_integral(double z) const;
};

}  // namespace lcsbp
