#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lcsbp/classify.hpp"
#include "lcsbp/duality.hpp"
#include "lcsbp/formulas.hpp"
#include "lcsbp/manifest.hpp"
#include "lcsbp/report.hpp"
#include "lcsbp/simulate.hpp"
#include "lcsbp/specio.hpp"

using namespace lcsbp;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 2, kInconclusive = 3, kNumeric = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

unsigned env_workers() {
  if (const char* w = std::getenv("LCSBP_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(w, &end, 10);
    if (end != w && *end == '\0' && v >= 0) return static_cast<unsigned>(v);
  }
  return 0;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + csv_number(v[i]);
  return s;
}

// Collects outputs and writes one manifest sidecar per output file.
class Run {
 public:
  Run(std::string command, int argc, char** argv) : start_(std::chrono::steady_clock::now()) {
    m_.command = std::move(command);
    m_.argv.assign(argv, argv + argc);
    m_.started_utc = utc_now_iso8601();
  }
  void spec(const std::string& path) {
    m_.spec_path = path;
    m_.spec_sha256 = sha256_file(path);
  }
  void seed(std::uint64_t s) { m_.seed = s; }
  void workers(unsigned w) { m_.workers = w; }
  void config(const std::string& k, const std::string& v) { m_.config[k] = v; }
  void config(const std::string& k, double v) { m_.config[k] = csv_number(v); }

  void write(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << content;
    out.close();
    m_.outputs.push_back({path, sha256_hex(content)});
  }

  void finish(int code) {
    m_.exit_code = code;
    m_.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    for (auto& o : m_.outputs) write_manifest(m_, manifest_path_for(o.path));
  }

 private:
  RunManifest m_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string spec;
  double theta = 1.0;
  bool strict = false;
  std::string out = "classify.json";
};

int cmd_classify(const ClassifyArgs& a, Run& run) {
  MechanismSpec spec = load_spec(a.spec);
  run.spec(a.spec);
  run.config("theta", a.theta);
  run.config("strict", a.strict ? "true" : "false");
  BoundaryReport r = classify_all(spec, a.theta);
  std::cout << classify_table(r);
  run.write(a.out, classify_report_json(r) + "\n");
  if (a.strict && r.any_inconclusive()) {
    std::cerr << "inconclusive verdicts under --strict\n";
    return kInconclusive;
  }
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  std::string kind;
  std::string spec;
  double z0 = 1.0;
  double x0 = 1.0;
  double k = 0.0;
  std::string mode = "absorb";
  std::size_t paths = 1000;
  std::uint64_t seed = 0;
  double tmax = 1.0;
  std::vector<double> grid;
  std::size_t grid_n = 0;
  double dt = 1e-2;
  std::vector<double> levels;
  std::vector<double> laplace;
  double jump_rate = 1e4;
  double jump_cutoff = 0.0;
  double r_time_cap = 1e4;
  bool unstopped = false;
  bool coupled = false;
  unsigned workers = 0;
  std::string out = "simulate.csv";
  std::string summary;
};

ojson num(double v) {
  if (std::isfinite(v)) return v;
  return csv_number(v);
}

int cmd_simulate(const SimArgs& a, Run& run) {
  MechanismSpec spec = load_spec(a.spec);
  run.spec(a.spec);
  run.seed(a.seed);
  run.workers(a.workers);
  SimConfig cfg;
  cfg.seed = a.seed;
  cfg.n_paths = a.paths;
  cfg.dt = a.dt;
  cfg.t_max = a.tmax;
  cfg.levels = a.levels;
  cfg.max_jump_rate = a.jump_rate;
  cfg.jump_cutoff = a.jump_cutoff;
  cfg.r_time_cap = a.r_time_cap;
  cfg.stop_at_zero = !a.unstopped;
  cfg.coupled = a.coupled;
  cfg.workers = a.workers;
  cfg.grid = a.grid;
  if (a.grid_n > 0) {
    if (!std::isfinite(a.tmax)) throw UsageError("--grid-n needs a finite --tmax");
    cfg.grid.clear();
    for (std::size_t i = 0; i <= a.grid_n; ++i) cfg.grid.push_back(a.tmax * static_cast<double>(i) / a.grid_n);
  }
  for (auto [k, v] : std::map<std::string, double>{{"dt", a.dt}, {"tmax", a.tmax}, {"jump_rate", a.jump_rate},
                                                   {"jump_cutoff", a.jump_cutoff}, {"r_time_cap", a.r_time_cap}})
    run.config(k, v);
  run.config("kind", a.kind);
  run.config("paths", std::to_string(a.paths));
  run.config("grid", join(cfg.grid));
  run.config("levels", join(a.levels));

  std::vector<PathRecord> paths;
  double start = a.kind == "u" ? a.x0 : a.z0;
  run.config(a.kind == "u" ? "x0" : "z0", start);
  if (a.kind == "ou") {
    paths = simulate_ou(spec, a.z0, cfg);
  } else if (a.kind == "zmin") {
    paths = simulate_zmin(spec, a.z0, cfg);
  } else if (a.kind == "zk") {
    run.config("k", a.k);
    paths = simulate_zk(spec, a.k, a.z0, cfg);
  } else {
    run.config("mode", a.mode);
    run.config("coupled", a.coupled ? "true" : "false");
    paths = simulate_u(spec, a.x0, a.mode == "entrance" ? UMode::entrance : UMode::absorb_at_zero, cfg);
  }

  const bool has_clock = a.kind == "zmin" || a.kind == "zk";
  std::ostringstream csv;
  {
    std::vector<std::string> header{"path", "time", "value"};
    if (has_clock) header.push_back("clock");
    CsvWriter w(csv, header);
    for (std::size_t i = 0; i < paths.size(); ++i)
      for (std::size_t j = 0; j < paths[i].times.size(); ++j) {
        std::vector<double> row{static_cast<double>(i), paths[i].times[j], paths[i].values[j]};
        if (has_clock) row.push_back(j < paths[i].clock.size() ? paths[i].clock[j] : NAN);
        w.row(row);
      }
  }
  run.write(a.out, csv.str());

  ojson s;
  s["kind"] = a.kind;
  s["start"] = start;
  s["paths"] = paths.size();
  std::size_t at_zero = 0, at_inf = 0, killed = 0, degraded = 0, r_zero = 0;
  for (auto& p : paths) {
    at_zero += p.absorbed_at == Absorption::zero;
    at_inf += p.absorbed_at == Absorption::infinity;
    killed += p.killed;
    degraded += p.degraded;
    r_zero += p.r_zero_time.has_value();
  }
  s["absorbed_at_zero"] = at_zero;
  s["absorbed_at_infinity"] = at_inf;
  s["killed"] = killed;
  s["degraded"] = degraded;
  if (has_clock) s["clock_reached_zero"] = r_zero;
  ojson times = ojson::array();
  if (!paths.empty())
    for (double t : paths.front().times) {
      ojson e;
      e["t"] = t;
      Estimate m = mc_mean(paths, [&](const PathRecord& p) {
        double v = value_at(p, t);
        return std::isfinite(v) ? v : 0.0;
      });
      std::size_t finite = 0, zero = 0;
      for (auto& p : paths) {
        double v = value_at(p, t);
        finite += std::isfinite(v);
        zero += v == 0;
      }
      e["mean_finite_part"] = num(m.mean);
      e["fraction_finite"] = static_cast<double>(finite) / paths.size();
      e["fraction_zero"] = static_cast<double>(zero) / paths.size();
      ojson lap = ojson::array();
      for (double x : a.laplace) {
        Estimate l = mc_laplace(paths, x, t);
        lap.push_back({{"x", x}, {"mean", num(l.mean)}, {"se", num(l.se)}});
      }
      e["laplace"] = lap;
      times.push_back(e);
    }
  s["times"] = times;
  ojson lv = ojson::array();
  for (double level : a.levels) {
    std::size_t hit = 0;
    double sum = 0.0;
    for (auto& p : paths) {
      auto it = p.first_passage.find(level);
      if (it != p.first_passage.end() && it->second) ++hit, sum += *it->second;
    }
    ojson e{{"level", level},
            {"fraction_hit", paths.empty() ? 0.0 : static_cast<double>(hit) / paths.size()},
            {"mean_time_given_hit", hit ? num(sum / hit) : ojson(nullptr)}};
    if (has_clock) {
      std::size_t n = 0;
      double ps = 0.0;
      for (auto& p : paths) {
        auto it = p.progeny.find(level);
        if (it != p.progeny.end() && it->second) ++n, ps += *it->second;
      }
      e["mean_progeny_given_hit"] = n ? num(ps / n) : ojson(nullptr);
    }
    lv.push_back(e);
  }
  s["levels"] = lv;
  run.write(a.summary.empty() ? a.out + ".summary.json" : a.summary, s.dump(2) + "\n");
  return kOk;
}

// ---------------------------------------------------------------- formula

struct FormulaArgs {
  std::string which;
  std::string spec;
  std::vector<double> z0{1.0};
  std::vector<double> x0{1.0};
  std::vector<double> x{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> theta{1.0};
  std::vector<double> s{1.0};
  std::vector<double> t{1.0};
  std::vector<double> a{0.5};
  std::vector<double> mu{1.0};
  bool strict = false;
  std::string out = "formula.csv";
};

int cmd_formula(const FormulaArgs& f, Run& run) {
  MechanismSpec spec = load_spec(f.spec);
  run.spec(f.spec);
  run.config("formula", f.which);
  std::ostringstream csv;
  int code = kOk;
  // Evaluates one row; inconclusive verdicts become nan rows unless --strict.
  auto eval = [&](const std::function<FormulaValue()>& fn) -> FormulaValue {
    try {
      return fn();
    } catch (const InconclusiveError& e) {
      if (f.strict) throw;
      return {NAN, NAN, false, std::string("inconclusive: ") + e.what()};
    }
  };
  auto tail = [](const FormulaValue& v) {
    return std::vector<std::string>{csv_number(v.value), csv_number(v.error), v.note};
  };
  auto emit = [&](CsvWriter& w, std::vector<double> keys, const FormulaValue& v) {
    std::vector<std::string> row;
    for (double k : keys) row.push_back(csv_number(k));
    for (auto& s : tail(v)) row.push_back(s);
    w.row(row);
  };

  if (f.which == "ou-laplace") {
    run.config("z0", join(f.z0)), run.config("theta", join(f.theta)), run.config("s", join(f.s));
    CsvWriter w(csv, {"z0", "theta", "s", "value", "error", "note"});
    for (double z : f.z0)
      for (double th : f.theta)
        for (double s : f.s) emit(w, {z, th, s}, eval([&] { return ou_laplace(spec, z, th, s); }));
  } else if (f.which == "hitting" || f.which == "progeny") {
    run.config("z0", join(f.z0)), run.config("a", join(f.a)), run.config("mu", join(f.mu));
    CsvWriter w(csv, {"z0", "a", "mu", "value", "error", "note"});
    for (double z : f.z0)
      for (double a : f.a)
        for (double mu : f.mu)
          emit(w, {z, a, mu}, eval([&] {
                 return f.which == "hitting" ? hitting_laplace(spec, z, a, mu) : progeny_laplace(spec, z, a, mu);
               }));
  } else if (f.which == "extinction") {
    run.config("z0", join(f.z0));
    CsvWriter w(csv, {"z0", "value", "error", "note"});
    for (double z : f.z0) emit(w, {z}, eval([&] { return extinction_prob(spec, z); }));
  } else if (f.which == "stationary") {
    run.config("x", join(f.x));
    CsvWriter w(csv, {"x", "value", "error", "degenerate", "note"});
    for (double x : f.x) {
      FormulaValue v = eval([&] { return stationary_laplace(spec, x); });
      w.row(std::vector<std::string>{csv_number(x), csv_number(v.value), csv_number(v.error),
                                     v.degenerate ? "true" : "false", v.note});
    }
  } else if (f.which == "exit-u") {
    run.config("x0", join(f.x0));
    CsvWriter w(csv, {"x0", "value", "error", "note"});
    for (double x : f.x0) emit(w, {x}, eval([&] { return exit_prob_u(spec, x); }));
  } else {
    run.config("x", join(f.x)), run.config("t", join(f.t));
    CsvWriter w(csv, {"x", "t", "value", "error", "note"});
    for (double x : f.x)
      for (double t : f.t) emit(w, {x, t}, eval([&] { return cumulant_ode(spec, x, t); }));
  }
  run.write(f.out, csv.str());
  std::cout << csv.str();
  return code;
}

// ---------------------------------------------------------------- duality

struct DualityArgs {
  std::vector<std::string> specs;
  bool golden = false;
  std::string grid;
  std::size_t paths = 100000;
  std::uint64_t seed = 0;
  double dt = 1e-2;
  double k_reflect = 1e5;
  double jump_rate = 1e3;
  double sigma_rule = 3.0;
  unsigned workers = 0;
  std::string out = "duality";
};

double parse_number(const std::string& s) {
  std::string t = s;
  t.erase(0, t.find_first_not_of(" \t"));
  t.erase(t.find_last_not_of(" \t\r") + 1);
  if (t == "inf" || t == "Inf" || t == "+inf") return INFINITY;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("bad number '" + s + "' in grid file");
  }
  if (used != t.size()) throw UsageError("bad number '" + s + "' in grid file");
  return v;
}

std::vector<DualityPoint> load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read grid file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw UsageError("empty grid file");
  std::string header;
  for (char ch : line)
    if (ch != ' ' && ch != '\r') header += ch;
  if (header != "z0,x0,t") throw UsageError("grid file header must be 'z0,x0,t'");
  std::vector<DualityPoint> g;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 3) throw UsageError("grid rows need three fields: " + line);
    g.push_back({parse_number(f[0]), parse_number(f[1]), parse_number(f[2])});
  }
  return g;
}

int cmd_duality(const DualityArgs& a, Run& run) {
  std::vector<SuiteSpec> specs;
  if (a.golden) specs = golden_suite_specs();
  for (auto& path : a.specs) {
    specs.push_back({std::filesystem::path(path).stem().string(), load_spec(path)});
    run.spec(path);
  }
  if (specs.empty()) throw UsageError("give --spec or --golden");
  std::vector<DualityPoint> grid = a.grid.empty() ? default_duality_grid() : load_grid(a.grid);
  DualityConfig cfg;
  cfg.sim.n_paths = a.paths;
  cfg.sim.seed = a.seed;
  cfg.sim.dt = a.dt;
  cfg.sim.max_jump_rate = a.jump_rate;
  cfg.sim.workers = a.workers;
  cfg.k_reflect = a.k_reflect;
  cfg.sigma_rule = a.sigma_rule;
  run.seed(a.seed);
  run.workers(a.workers);
  run.config("paths", std::to_string(a.paths));
  run.config("dt", a.dt);
  run.config("k_reflect", a.k_reflect);
  run.config("jump_rate", a.jump_rate);
  run.config("sigma_rule", a.sigma_rule);
  run.config("grid", a.grid.empty() ? "default 3x3x3" : a.grid);
  run.config("golden", a.golden ? "true" : "false");

  SuiteReport rep = run_suite(specs, grid, cfg);
  std::ostringstream csv;
  {
    CsvWriter w(csv, {"spec", "z0", "x0", "t", "lhs", "lhs_se", "rhs", "rhs_se", "discrepancy", "verdict", "note"});
    for (auto& s : rep.specs)
      for (auto& c : s.checks)
        w.row(std::vector<std::string>{s.name, csv_number(c.z0), csv_number(c.x0), csv_number(c.t),
                                       csv_number(c.lhs.mean), csv_number(c.lhs.se), csv_number(c.rhs.mean),
                                       csv_number(c.rhs.se), csv_number(c.discrepancy), c.pass ? "pass" : "fail",
                                       c.note});
  }
  run.write(a.out + ".csv", csv.str());
  run.write(a.out + ".report.json", suite_report_json(rep) + "\n");
  for (auto& s : rep.specs) {
    std::cout << s.name << " [" << to_string(s.regime) << "]: " << s.passed << "/" << s.checks.size() << " pass";
    for (auto& c : s.clusters) std::cout << "; cluster " << c;
    std::cout << "\n";
  }
  std::cout << "total " << rep.passed << "/" << rep.total << " (" << 100.0 * rep.pass_rate() << "%), expected false failures "
            << rep.expected_failures << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lcsbp: boundary classification, simulation and duality checks for logistic CSBPs"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  const unsigned default_workers = env_workers();

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Boundary classes of Z and U with the Feller cross-check");
  classify->add_option("--spec", ca.spec, "Mechanism spec file (JSON)")->required()->check(CLI::ExistingFile);
  classify->add_option("--theta", ca.theta, "Base point of the scale integrals")->capture_default_str()->check(CLI::PositiveNumber);
  classify->add_flag("--strict", ca.strict, "Exit 3 when any verdict is inconclusive");
  classify->add_option("--out", ca.out, "Machine report path")->capture_default_str();

  SimArgs sa;
  sa.workers = default_workers;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo paths; CSV plus a summary document");
  simulate->require_subcommand(1);
  for (const char* kind : {"zmin", "zk", "u", "ou"}) {
    std::string help = std::string(kind) == "zmin" ? "Minimal process Z by Lamperti time change"
                       : std::string(kind) == "zk" ? "Z under the truncated mechanism Psi_k"
                       : std::string(kind) == "u"  ? "Dual diffusion U"
                                                   : "OU-type process R";
    auto* sub = simulate->add_subcommand(kind, help);
    sub->add_option("--spec", sa.spec, "Mechanism spec file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", sa.seed, "Master seed")->required();
    if (std::string(kind) == "u") {
      sub->add_option("--x0", sa.x0, "Start of U")->capture_default_str()->check(CLI::NonNegativeNumber);
      sub->add_option("--mode", sa.mode, "Behaviour at 0: absorb or entrance")
          ->capture_default_str()
          ->check(CLI::IsMember({"absorb", "entrance"}));
      sub->add_flag("--coupled", sa.coupled, "Inversion sampling (monotone coupling)");
    } else {
      sub->add_option("--z0", sa.z0, "Start of Z (or R)")->capture_default_str()->check(CLI::NonNegativeNumber);
    }
    if (std::string(kind) == "zk")
      sub->add_option("--k", sa.k, "Truncation level")->required()->check(CLI::PositiveNumber);
    if (std::string(kind) == "ou")
      sub->add_flag("--unstopped", sa.unstopped, "Keep R running below 0 instead of stopping it");
    sub->add_option("--paths", sa.paths, "Number of paths")->capture_default_str();
    sub->add_option("--tmax", sa.tmax, "Horizon in the process's own clock (inf allowed for zmin/zk)")
        ->capture_default_str();
    sub->add_option("--grid", sa.grid, "Output times, comma separated (default: tmax)")->delimiter(',');
    sub->add_option("--grid-n", sa.grid_n, "Uniform grid of n+1 points on [0, tmax]");
    sub->add_option("--dt", sa.dt, "Step size")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--levels", sa.levels, "Downward first-passage levels")->delimiter(',');
    sub->add_option("--laplace", sa.laplace, "x values for Laplace estimates in the summary")->delimiter(',');
    sub->add_option("--jump-rate", sa.jump_rate, "Largest simulated jump rate when picking the cutoff")
        ->capture_default_str();
    sub->add_option("--jump-cutoff", sa.jump_cutoff, "Small-jump cutoff; 0 picks it from --jump-rate")
        ->capture_default_str();
    sub->add_option("--r-time-cap", sa.r_time_cap, "R-time budget when tmax is inf")->capture_default_str();
    sub->add_option("--workers", sa.workers, "Threads (0: all cores; env LCSBP_WORKERS)")->capture_default_str();
    sub->add_option("--out", sa.out, "Path CSV")->capture_default_str();
    sub->add_option("--summary", sa.summary, "Summary document (default: <out>.summary.json)");
    sub->callback([&sa, kind] { sa.kind = kind; });
  }

  FormulaArgs fa;
  auto* formula = app.add_subcommand("formula", "Quadrature formulas; one CSV row per argument combination");
  formula->require_subcommand(1);
  for (const char* which : {"ou-laplace", "hitting", "progeny", "extinction", "stationary", "exit-u", "cumulant"}) {
    std::string w = which;
    auto* sub = formula->add_subcommand(w, "");
    sub->add_option("--spec", fa.spec, "Mechanism spec file (JSON)")->required()->check(CLI::ExistingFile);
    if (w == "ou-laplace" || w == "hitting" || w == "progeny" || w == "extinction")
      sub->add_option("--z0", fa.z0, "Starting points")->delimiter(',')->capture_default_str();
    if (w == "ou-laplace") {
      sub->description("E_z0[exp(-theta R_s)]");
      sub->add_option("--theta", fa.theta, "theta values")->delimiter(',')->capture_default_str();
      sub->add_option("--s", fa.s, "R-times")->delimiter(',')->capture_default_str();
    }
    if (w == "hitting" || w == "progeny") {
      sub->description(w == "hitting" ? "E_z0[exp(-mu sigma_a)]" : "E_z0[exp(-mu int_0^zeta_a Z ds)]");
      sub->add_option("--a", fa.a, "Levels")->delimiter(',')->capture_default_str();
      sub->add_option("--mu", fa.mu, "Rates")->delimiter(',')->capture_default_str();
    }
    if (w == "extinction") sub->description("P_z0(Z tends to 0)");
    if (w == "stationary") {
      sub->description("Laplace transform of the stationary law");
      sub->add_option("--x", fa.x, "x grid")->delimiter(',')->capture_default_str();
    }
    if (w == "exit-u") {
      sub->description("P_x0(U tends to 0)");
      sub->add_option("--x0", fa.x0, "Starting points")->delimiter(',')->capture_default_str();
    }
    if (w == "cumulant") {
      sub->description("u_t(x) solving du/dt = -Psi(u)");
      sub->add_option("--x", fa.x, "Initial values")->delimiter(',')->capture_default_str();
      sub->add_option("--t", fa.t, "Times")->delimiter(',')->capture_default_str();
    }
    sub->add_flag("--strict", fa.strict, "Exit 3 on an inconclusive integral test");
    sub->add_option("--out", fa.out, "CSV path")->capture_default_str();
    sub->callback([&fa, w] { fa.which = w; });
  }

  DualityArgs da;
  da.workers = default_workers;
  auto* duality = app.add_subcommand("duality", "Laplace duality checks, Z side against U side");
  duality->add_option("--spec", da.specs, "Spec files (repeatable)")->check(CLI::ExistingFile);
  duality->add_flag("--golden", da.golden, "Include the four built-in golden specs");
  duality->add_option("--grid", da.grid, "CSV with header z0,x0,t (z0 may be inf); default 3x3x3")
      ->check(CLI::ExistingFile);
  duality->add_option("--paths", da.paths, "Paths per side")->capture_default_str();
  duality->add_option("--seed", da.seed, "Master seed")->required();
  duality->add_option("--dt", da.dt, "Step size")->capture_default_str();
  duality->add_option("--k-reflect", da.k_reflect, "Truncation level in the reflecting regime")->capture_default_str();
  duality->add_option("--jump-rate", da.jump_rate, "Largest simulated jump rate")->capture_default_str();
  duality->add_option("--sigma-rule", da.sigma_rule, "Pass threshold in combined SEs")->capture_default_str();
  duality->add_option("--workers", da.workers, "Threads (0: all cores; env LCSBP_WORKERS)")->capture_default_str();
  duality->add_option("--out", da.out, "Output prefix: <out>.csv and <out>.report.json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  std::string command = classify->parsed() ? "classify" : simulate->parsed() ? "simulate" : formula->parsed() ? "formula" : "duality";
  Run run(command, argc, argv);
  int code = kOk;
  try {
    if (classify->parsed())
      code = cmd_classify(ca, run);
    else if (simulate->parsed())
      code = cmd_simulate(sa, run);
    else if (formula->parsed())
      code = cmd_formula(fa, run);
    else
      code = cmd_duality(da, run);
  } catch (const SpecParseError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    code = kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    code = kUsage;
  } catch (const InconclusiveError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    code = kInconclusive;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    code = kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    code = kNumeric;
  }
  try {
    run.finish(code);
  } catch (const std::exception& e) {
    std::cerr << "manifest: " << e.what() << "\n";
    if (code == kOk) code = kNumeric;
  }
  return code;
}
