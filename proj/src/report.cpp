#include "lcsbp/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace lcsbp {

namespace {

using json = nlohmann::ordered_json;

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json verdict_json(const IntegralVerdict& v) {
  json j;
  j["status"] = to_string(v.status);
  if (v.converges()) j["value"] = num(v.value);
  j["note"] = v.note;
  j["applicable"] = v.applicable;
  return j;
}

json estimate_json(const Estimate& e) { return json{{"mean", num(e.mean)}, {"se", num(e.se)}, {"n", e.n}}; }

}  // namespace

std::string classify_report_json(const BoundaryReport& r, int indent) {
  json j;
  j["z_at_infinity"] = to_string(r.z_at_infinity);
  j["z_at_zero"] = to_string(r.z_at_zero);
  j["u_at_zero"] = to_string(r.u_at_zero);
  j["u_at_infinity"] = to_string(r.u_at_infinity);
  j["u_at_zero_feller"] = to_string(r.u_at_zero_feller);
  j["u_at_infinity_feller"] = to_string(r.u_at_infinity_feller);
  j["correspondence_ok"] = r.correspondence_ok;
  j["condition_A"] = r.condition_A ? json(*r.condition_A) : json(nullptr);
  j["subordinator_dual"] = r.subordinator_dual;
  j["two_lambda_over_c"] = num(r.two_lambda_over_c);
  j["theta"] = r.theta;
  json v = json::object();
  for (auto& [k, x] : r.verdicts) v[k] = verdict_json(x);
  j["verdicts"] = v;
  j["shortcuts_used"] = r.shortcuts_used;
  j["discrepancies"] = r.discrepancies;
  json tc = json::array();
  for (auto& [t, s] : r.theta_consistency) tc.push_back({{"theta", t}, {"E", to_string(s)}});
  j["theta_consistency"] = tc;
  j["theta_consistent"] = r.theta_consistent;
  j["inconclusive"] = r.any_inconclusive();
  return j.dump(indent);
}

std::string suite_report_json(const SuiteReport& r, int indent) {
  json j;
  j["total"] = r.total;
  j["passed"] = r.passed;
  j["pass_rate"] = r.pass_rate();
  j["expected_failures"] = r.expected_failures;
  json specs = json::array();
  for (auto& s : r.specs) {
    json e;
    e["name"] = s.name;
    e["regime"] = to_string(s.regime);
    e["passed"] = s.passed;
    e["checks"] = s.checks.size();
    e["lhs_monotone_in_x0"] = s.lhs_monotone;
    e["rhs_monotone_in_z0"] = s.rhs_monotone;
    e["clusters"] = s.clusters;
    json cs = json::array();
    for (auto& c : s.checks)
      cs.push_back({{"z0", num(c.z0)},
                    {"x0", num(c.x0)},
                    {"t", num(c.t)},
                    {"lhs", estimate_json(c.lhs)},
                    {"rhs", estimate_json(c.rhs)},
                    {"discrepancy", num(c.discrepancy)},
                    {"pass", c.pass},
                    {"stable", c.stable},
                    {"note", c.note}});
    e["results"] = cs;
    specs.push_back(e);
  }
  j["specs"] = specs;
  return j.dump(indent);
}

std::string classify_table(const BoundaryReport& r) {
  std::ostringstream o;
  auto row = [&](const std::string& a, const std::string& b) { o << std::left << std::setw(28) << a << b << "\n"; };
  row("boundary", "class");
  row("Z at infinity", to_string(r.z_at_infinity));
  row("Z at 0", to_string(r.z_at_zero));
  row("U at 0 (correspondence)", to_string(r.u_at_zero));
  row("U at 0 (Feller tests)", to_string(r.u_at_zero_feller));
  row("U at infinity (corresp.)", to_string(r.u_at_infinity));
  row("U at infinity (Feller)", to_string(r.u_at_infinity_feller));
  row("2 lambda / c", std::to_string(r.two_lambda_over_c));
  row("agreement", r.correspondence_ok ? "yes" : "NO");
  for (auto& [k, v] : r.verdicts) row("  " + k, std::string(to_string(v.status)) + (v.note.empty() ? "" : "  (" + v.note + ")"));
  for (auto& d : r.discrepancies) row("  discrepancy", d);
  return o.str();
}

}  // namespace lcsbp
