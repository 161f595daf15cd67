#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcsbp/mechanism.hpp"
#include "lcsbp/qtable.hpp"
#include "lcsbp/quadrature.hpp"

namespace lcsbp {

enum class ZInfinity { entrance, regular_reflecting, exit, inconclusive };
enum class ZZero { exit, natural, inconclusive };
enum class UZero { exit, regular_absorbing, entrance, natural, inconclusive };
enum class UInfinity { entrance, natural, inconclusive };

const char* to_string(ZInfinity v);
const char* to_string(ZZero v);
const char* to_string(UZero v);
const char* to_string(UInfinity v);

/// Boundary classes of U implied by those of Z.
UZero u_zero_from(ZInfinity z);
UInfinity u_infinity_from(ZZero z);

struct FellerResult {
  std::map<std::string, IntegralVerdict> verdicts;  // I0, J0, I_inf, J_inf
  UZero u_at_zero = UZero::inconclusive;
  UInfinity u_at_infinity = UInfinity::inconclusive;
  std::vector<std::string> shortcuts_used;
  std::vector<std::string> discrepancies;
};

struct BoundaryReport {
  ZInfinity z_at_infinity = ZInfinity::inconclusive;
  ZZero z_at_zero = ZZero::inconclusive;
  UZero u_at_zero = UZero::inconclusive;        // from the correspondence
  UInfinity u_at_infinity = UInfinity::inconclusive;
  UZero u_at_zero_feller = UZero::inconclusive;  // from the Feller tests
  UInfinity u_at_infinity_feller = UInfinity::inconclusive;
  bool correspondence_ok = false;
  std::optional<bool> condition_A;  // empty when not applicable
  bool subordinator_dual = false;
  double two_lambda_over_c = 0.0;
  double theta = 1.0;
  std::map<std::string, IntegralVerdict> verdicts;
  std::vector<std::string> shortcuts_used;
  std::vector<std::string> discrepancies;
  std::map<double, VerdictStatus> theta_consistency;  // E status per theta
  bool theta_consistent = true;

  bool any_inconclusive() const;
};

using ShortcutLog = std::vector<std::string>;

IntegralVerdict test_E(const MechanismSpec& spec, double theta, ShortcutLog* log = nullptr);
IntegralVerdict test_E(const QTable& table, double theta, ShortcutLog* log = nullptr);

/// Cross-checked against test_E; pass a known E verdict to skip recomputing it.
IntegralVerdict test_E_prime(const MechanismSpec& spec, double theta, ShortcutLog* log = nullptr,
                             const IntegralVerdict* e_verdict = nullptr);

IntegralVerdict test_grey(const MechanismSpec& spec, ShortcutLog* log = nullptr);

/// Empty when not applicable (needs a subordinator dual with 2 lambda / c < 1).
std::optional<bool> check_condition_A(const MechanismSpec& spec);

FellerResult feller_tests_U(const MechanismSpec& spec, double theta);
FellerResult feller_tests_U(const QTable& table, double theta,
                            const IntegralVerdict* e_verdict = nullptr,
                            const IntegralVerdict* grey_verdict = nullptr);

BoundaryReport classify_all(const MechanismSpec& spec, double theta = 1.0);

}  // namespace lcsbp
