#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "lcsbp/mechanism.hpp"

namespace lcsbp {

enum class Absorption { none, zero, infinity };
const char* to_string(Absorption a);

struct SimConfig {
  std::uint64_t seed = 1;
  std::size_t n_paths = 1000;
  double dt = 1e-2;
  /// Jumps below the cutoff are replaced by a Gaussian; 0 picks the cutoff
  /// whose tail mass equals max_jump_rate (or no cutoff for finite measures
  /// below that rate).
  double jump_cutoff = 0.0;
  double max_jump_rate = 1e4;
  /// Horizon in the process's own clock (R-time for simulate_ou, Z-time for
  /// simulate_zmin/zk, U-time for simulate_u). May be +inf for zmin/zk.
  double t_max = 1.0;
  /// R-time budget for paths run with an infinite horizon.
  double r_time_cap = 1e4;
  /// Output times; empty means {t_max} when finite.
  std::vector<double> grid;
  /// Downward first-passage levels.
  std::vector<double> levels;
  /// simulate_ou only: stop R at the first entry below 0.
  bool stop_at_zero = true;
  /// simulate_u only: inversion sampling so paths are monotone in the start
  /// and in the drift under common random numbers.
  bool coupled = false;
  /// Zero means the hardware concurrency.
  unsigned workers = 0;
  /// R above this counts as explosion.
  double explosion_level = 1e200;
  /// Z-time spacing of the samples used for total-progeny integrals; 0 uses dt.
  double progeny_dt = 0.0;
};

struct PathRecord {
  std::vector<double> times;
  std::vector<double> values;
  /// R-time elapsed at each output time (zmin/zk only).
  std::vector<double> clock;
  Absorption absorbed_at = Absorption::none;
  std::optional<double> absorption_time;
  /// level -> first time at or below it, in the process's own clock
  std::map<double, std::optional<double>> first_passage;
  /// level -> int_0^{zeta_a} Z dt from Z-time samples (zmin/zk only)
  std::map<double, std::optional<double>> progeny;
  bool killed = false;
  /// A step fell below the representable floor near zero.
  bool degraded = false;
  /// R-time at which R reached 0 (zmin/zk). Set with absorbed_at == none
  /// when the clock diverges there, i.e. Z only tends to 0.
  std::optional<double> r_zero_time;
};

enum class UMode { absorb_at_zero, entrance };

using Rng = std::mt19937_64;

/// Generator for path `index` of a run seeded with `seed`.
Rng path_rng(std::uint64_t seed, std::uint64_t index);

/// Derived seed for an independent sub-run (e.g. the two sides of a duality check).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

PathRecord simulate_ou_path(const MechanismSpec& spec, double z0, const SimConfig& cfg, std::uint64_t index);
PathRecord simulate_zmin_path(const MechanismSpec& spec, double z0, const SimConfig& cfg, std::uint64_t index);
PathRecord simulate_u_path(const MechanismSpec& spec, double x0, UMode mode, const SimConfig& cfg,
                           std::uint64_t index);

std::vector<PathRecord> simulate_ou(const MechanismSpec& spec, double z0, const SimConfig& cfg);
std::vector<PathRecord> simulate_zmin(const MechanismSpec& spec, double z0, const SimConfig& cfg);
/// simulate_zmin under truncate(spec, k).
std::vector<PathRecord> simulate_zk(const MechanismSpec& spec, double k, double z0, const SimConfig& cfg);
std::vector<PathRecord> simulate_u(const MechanismSpec& spec, double x0, UMode mode, const SimConfig& cfg);

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Value of a path at time t: exact grid match, else the last grid value before t.
double value_at(const PathRecord& p, double t);

/// Mean and standard error of exp(-x value(t)); exp(-x inf) = 0 for x > 0, 1 for x = 0.
/// x = inf gives the fraction of paths at exactly 0.
Estimate mc_laplace(const std::vector<PathRecord>& paths, double x, double t);

/// Mean and standard error of f over paths, summed in index order.
Estimate mc_mean(const std::vector<PathRecord>& paths, const std::function<double(const PathRecord&)>& f);

/// Runs body(i) for i in [0, n) on `workers` threads (0: hardware concurrency).
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace lcsbp
