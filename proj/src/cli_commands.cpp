#include "epdecay/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>

#include "CLI11.hpp"

#include "epdecay/errors.hpp"
#include "epdecay/trajectory_io.hpp"

namespace epdecay {

namespace {

const std::vector<std::pair<std::string, std::string>> kCommands = {
    {"verify-symbols", "symbol identities, Lyapunov sweep and spectral bounds"},
    {"linear-decay", "whole-space linear decay rates on the radial quadrature path"},
    {"difference-decay", "exponential decay of the plasma-oscillation subsystem"},
    {"simulate", "nonlinear periodic-box run with invariant and decay checks"},
    {"lp-test", "Littlewood-Paley and Besov property suite"},
    {"report", "aggregate report.json verdicts and the rate-table identities"},
};

// Per-command defaults for values the user did not set.
struct Defaults {
  int dim = 3;
  int points = 16;
  double length = 32.0;
  double amplitude = 1e-2;
  double mass = 1.0;
  std::string initial = "gaussian-mass";
  std::string mode = "nonlinear";
  double dt = 0.05;
  double final_time = 1.0;
  double snapshot_interval = 0.5;
  std::vector<double> ells{0.0};
  double tolerance = tolerances::kQuadratureExponent;
  int samples = 100;
};

Defaults defaults_for(const std::string& command) {
  Defaults d;
  if (command == "verify-symbols") {
    d.samples = 10000;
  } else if (command == "linear-decay") {
    d.ells = {0.0, 0.5, 1.0};
  } else if (command == "difference-decay") {
    d.points = 16;
    d.length = 2.0 * std::numbers::pi;
    d.initial = "random-band";
    d.mode = "linear_difference";
    d.dt = 0.01;
    d.final_time = 30.0;
    d.snapshot_interval = 0.25;
  } else if (command == "simulate") {
    const SolverConfig c = default_simulation_config();
    d.points = c.grid.points();
    d.length = c.grid.length();
    d.dt = c.dt;
    d.final_time = c.final_time;
    d.snapshot_interval = c.snapshot_interval;
    d.tolerance = tolerances::kGridDecaySlope;
  } else if (command == "lp-test") {
    d.points = 32;
    d.length = 8.0 * std::numbers::pi;
  }
  return d;
}

[[noreturn]] void usage(const std::string& key, const std::string& message) {
  throw UsageError("--" + key + ": " + message);
}

void validate(const RunConfig& c) {
  if (c.dim < 1 || c.dim > 3) usage("dim", "must be 1, 2 or 3");
  if (c.points < 8 || c.points % 2 != 0) usage("points", "must be an even integer >= 8");
  if (!(c.length > 0.0)) usage("length", "must be positive");
  if (!(c.gamma > 1.0)) usage("gamma", "must exceed 1");
  if (!(c.amplitude > 0.0)) usage("amplitude", "must be positive");
  if (!(c.mass > 0.0)) usage("mass", "must be positive");
  if (!(c.dt > 0.0)) usage("dt", "must be positive");
  if (!(c.final_time > 0.0)) usage("final-time", "must be positive");
  if (!(c.snapshot_interval > 0.0) || c.snapshot_interval > c.final_time)
    usage("snapshot-interval", "must lie in (0, final-time]");
  if (c.s && !(*c.s > 0.0 && *c.s <= 1.5)) usage("s", "must lie in (0, 3/2]");
  if (c.p && !(*c.p >= 1.0 && *c.p < 2.0)) usage("p", "must lie in [1, 2)");
  if (c.ells.empty()) usage("ell", "needs at least one value");
  for (double ell : c.ells)
    if (!(ell >= 0.0) || ell > kCriticalRegularity - 1.0) usage("ell", "values must lie in [0, 3/2]");
  if (c.fit_t0 && c.fit_t1 && !(*c.fit_t0 < *c.fit_t1)) usage("fit-t0", "must be below fit-t1");
  if (!(c.tolerance > 0.0)) usage("tolerance", "must be positive");
  if (c.samples < 1) usage("samples", "must be >= 1");
  try {
    parse_initial_kind(c.initial);
  } catch (const std::exception& e) {
    usage("initial", e.what());
  }
  try {
    parse_solver_mode(c.mode);
  } catch (const std::exception& e) {
    usage("mode", e.what());
  }
}

std::optional<nlohmann::json> optional_json(const std::optional<double>& v) {
  if (v) return nlohmann::json(*v);
  return std::nullopt;
}

// ------------------------------------------------------------------ output

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::string file_stem(std::string name) {
  for (char& ch : name)
    if (ch == ':' || ch == '/' || ch == ' ') ch = '_';
  name.erase(std::remove(name.begin(), name.end(), '='), name.end());
  return name;
}

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "series");
  }

  const std::filesystem::path& root() const { return root_; }

  void json(const std::string& name, const nlohmann::json& j) {
    write_json(root_ / name, j);
    files_.push_back(name);
  }

  void dat(const std::string& name, const std::vector<double>& x, const std::vector<double>& y) {
    const std::string rel = "series/" + file_stem(name) + ".dat";
    std::ofstream f(root_ / rel);
    if (!f) throw ConfigError("cannot write " + (root_ / rel).string());
    for (std::size_t i = 0; i < x.size(); ++i) f << format_double(x[i]) << ' ' << format_double(y[i]) << '\n';
    files_.push_back(rel);
  }

  void norms(const std::vector<NormSeries>& series) {
    std::ofstream f(root_ / "norms.csv");
    if (!f) throw ConfigError("cannot write " + (root_ / "norms.csv").string());
    f << "t,quantity,ell,value\n";
    for (const NormSeries& s : series)
      for (std::size_t i = 0; i < s.times.size(); ++i)
        f << format_double(s.times[i]) << ',' << s.quantity << ',' << format_double(s.ell) << ','
          << format_double(s.values[i]) << '\n';
    files_.push_back("norms.csv");
    for (const NormSeries& s : series) dat(s.quantity, s.times, s.values);
  }

  void add(const std::string& name) { files_.push_back(name); }

  void manifest(const RunConfig& config, nlohmann::json extra) {
    nlohmann::json m{{"command", config.command}, {"config", config.to_json()}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    std::vector<std::string> files = files_;
    files.push_back("manifest.json");
    std::sort(files.begin(), files.end());
    m["outputs"] = files;
    write_json(root_ / "manifest.json", m);
  }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

nlohmann::json report_json(const RunConfig& config, const CheckSet& checks, nlohmann::json extra = {}) {
  nlohmann::json j = checks.to_json();
  j["command"] = config.command;
  if (!extra.is_null())
    for (auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

int finish(const CheckSet& checks, std::ostream& out, std::ostream& err) {
  out << checks.summary();
  if (checks.all_pass()) {
    out << "all checks passed\n";
    return kExitPass;
  }
  const auto failing = checks.failing();
  err << "failing checks:";
  for (const std::string& f : failing) err << ' ' << f;
  err << '\n';
  return kExitCheckFailure;
}

nlohmann::json fit_json(const DecayFit& f) {
  return {{"quantity", f.quantity},
          {"model", to_string(f.model)},
          {"exponent", f.exponent},
          {"stderr", f.standard_error},
          {"r_squared", f.r_squared},
          {"window", {f.window.t0, f.window.t1}},
          {"points", f.points}};
}

// ---------------------------------------------------------------- commands

int cmd_verify_symbols(const RunConfig& c, std::ostream& out, std::ostream& err) {
  SymbolSuiteOptions o;
  o.energy_samples = c.samples;
  o.lyapunov_samples = c.samples;
  o.seed = c.seed;
  const SymbolSuiteResult r = verify_symbols_suite(o);
  OutputDir dir(c.output);
  std::vector<double> rs, rate, envelope;
  for (const auto& row : r.sweep) {
    rs.push_back(row[0]);
    rate.push_back(row[1]);
    envelope.push_back(tolerances::kSpectralEnvelope * row[2]);
  }
  dir.dat("constrained_decay_exponent", rs, rate);
  dir.dat("dissipation_envelope", rs, envelope);
  dir.json("report.json", report_json(c, r.checks));
  dir.manifest(c, {});
  return finish(r.checks, out, err);
}

int cmd_lp_test(const RunConfig& c, std::ostream& out, std::ostream& err) {
  LpSuiteOptions o;
  o.dim = c.dim;
  o.points = c.points;
  o.length = c.length;
  o.samples = c.samples;
  o.seed = c.seed;
  const LpSuiteResult r = lp_property_suite(o);
  OutputDir dir(c.output);
  dir.json("report.json", report_json(c, r.checks, {{"fitted_constants", r.constants}}));
  dir.manifest(c, {});
  return finish(r.checks, out, err);
}

int cmd_linear_decay(const RunConfig& c, std::ostream& out, std::ostream& err) {
  LinearDecayOptions o;
  o.regime = c.regime();
  o.ells = c.ells;
  o.tolerance = c.tolerance;
  o.besov = c.besov;
  if (c.fit_t0) o.window.t0 = *c.fit_t0;
  if (c.fit_t1) o.window.t1 = *c.fit_t1;
  o.t_max = std::max(o.t_max, o.window.t1);
  const LinearDecayResult r = linear_decay_experiment(o);
  CheckSet checks = r.checks;
  checks.append(theory_consistency_suite());
  OutputDir dir(c.output);
  dir.norms(r.series);
  dir.json("report.json", report_json(c, checks, {{"fits", r.report.to_json()}, {"profile", r.profile.name}}));
  dir.manifest(c, {{"profile", r.profile.name}, {"regime", o.regime.label()}, {"window", {o.window.t0, o.window.t1}}});
  out << r.report.summary();
  return finish(checks, out, err);
}

int cmd_difference_decay(const RunConfig& c, std::ostream& out, std::ostream& err) {
  DifferenceDecayOptions o;
  o.dim = c.dim;
  o.points = c.points;
  o.length = c.length;
  o.amplitude = c.amplitude;
  o.dt = c.dt;
  o.final_time = c.final_time;
  o.snapshot_interval = c.snapshot_interval;
  o.seed = c.seed;
  o.window = {c.fit_t0.value_or(5.0), c.fit_t1.value_or(std::min(30.0, c.final_time))};
  const DifferenceDecayResult r = difference_decay_experiment(o);
  OutputDir dir(c.output);
  std::vector<NormSeries> series;
  nlohmann::json fits = nlohmann::json::object();
  for (const DifferenceCase& dc : r.cases) {
    NormSeries s = dc.series;
    s.quantity = dc.name + ":" + s.quantity;
    series.push_back(std::move(s));
    fits[dc.name] = fit_json(dc.fit);
  }
  dir.norms(series);
  dir.json("report.json", report_json(c, r.checks, {{"fits", fits}}));
  dir.manifest(c, {{"solver", to_json(r.cases.front().trajectory.config)}});
  return finish(r.checks, out, err);
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  SimulateOptions o;
  o.solver = c.solver_config();
  o.ells = c.ells;
  o.slope_tolerance = c.tolerance;
  if (c.fit_t0 || c.fit_t1) {
    const FitWindow def = default_window(Provenance::GridSolver, o.solver.grid.crossover_time());
    o.window = FitWindow{c.fit_t0.value_or(def.t0), c.fit_t1.value_or(def.t1)};
  }
  if (c.s) o.s = *c.s;
  o.linear_check = c.linear_check;
  SolverConfig linear = o.solver;
  linear.mode = SolverMode::LinearFull;
  // Amplitude and mass scaled together keep the bump width.
  linear.initial.amplitude = 1e-2 * c.amplitude;
  linear.initial.mass = 1e-2 * c.mass;
  linear.dt = std::min(c.dt, default_linear_check_config().dt);
  linear.final_time = std::min(c.final_time, default_linear_check_config().final_time);
  linear.snapshot_interval = std::min(c.snapshot_interval, linear.final_time);
  o.linear = linear;

  const SimulateResult r = simulate_experiment(o);
  OutputDir dir(c.output);
  dir.norms(r.series);
  write_diagnostics_csv(dir.root() / "diagnostics.csv", r.trajectory);
  dir.add("diagnostics.csv");
  if (c.save_trajectory) {
    write_trajectory(dir.root() / "trajectory.bin", r.trajectory);
    dir.add("trajectory.bin");
  }
  const EnergyFunctionals& e = r.energy;
  dir.dat("energy_E", e.times, e.e);
  dir.dat("energy_E0", e.times, e.e0);
  dir.dat("energy_E1", e.times, e.e1);
  dir.dat("energy_E2", e.times, e.e2);
  nlohmann::json extra{{"energy", {{"s", e.s}, {"m0", e.m0}, {"final", e.e.empty() ? 0.0 : e.e.back()},
                                   {"ell_grid_e1", e.ell_grid_e1}, {"ell_grid_e2", e.ell_grid_e2}}}};
  if (r.density_fit) extra["density_fit"] = fit_json(*r.density_fit);
  if (r.linear_error) extra["linear_oracle_error"] = *r.linear_error;
  dir.json("report.json", report_json(c, r.checks, extra));
  nlohmann::json manifest{{"solver", to_json(o.solver)}};
  if (o.linear_check) manifest["linear_check"] = to_json(linear);
  dir.manifest(c, manifest);
  return finish(r.checks, out, err);
}

int cmd_report(const RunConfig& c, std::ostream& out, std::ostream& err) {
  CheckSet checks;
  checks.name = "report";
  nlohmann::json sources = nlohmann::json::array();
  for (std::filesystem::path p : c.inputs) {
    if (std::filesystem::is_directory(p)) p /= "report.json";
    std::ifstream f(p);
    if (!f) usage("inputs", "cannot read " + p.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      usage("inputs", p.string() + " is not valid JSON: " + e.what());
    }
    const std::string command = j.value("command", p.parent_path().filename().string());
    const bool pass = j.value("all_pass", false);
    sources.push_back({{"path", p.string()}, {"command", command}, {"all_pass", pass},
                       {"failing", j.value("failing", std::vector<std::string>{})}});
    checks.at_least(command + ":" + p.parent_path().filename().string(), pass ? 1.0 : 0.0, 1.0,
                    "all checks in " + p.string());
  }
  checks.append(theory_consistency_suite());
  OutputDir dir(c.output);
  dir.json("report.json", report_json(c, checks, {{"sources", sources}}));
  dir.manifest(c, {});
  return finish(checks, out, err);
}

}  // namespace

// --------------------------------------------------------------- RunConfig

Regime RunConfig::regime() const {
  if (p) return Regime::p(*p);
  return Regime::s(s.value_or(1.5));
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig c;
  c.grid = Grid(dim, points, length);
  c.law = PressureLaw(gamma);
  c.mode = parse_solver_mode(mode);
  c.dt = dt;
  c.final_time = final_time;
  c.snapshot_interval = snapshot_interval;
  c.initial = InitialData{parse_initial_kind(initial), amplitude, mass, seed};
  return c;
}

nlohmann::json RunConfig::to_json() const {
  std::vector<std::string> in;
  for (const auto& p : inputs) in.push_back(p.string());
  return {{"output", output.string()},
          {"seed", seed},
          {"dim", dim},
          {"points", points},
          {"length", length},
          {"gamma", gamma},
          {"amplitude", amplitude},
          {"mass", mass},
          {"initial", initial},
          {"mode", mode},
          {"dt", dt},
          {"final-time", final_time},
          {"snapshot-interval", snapshot_interval},
          {"s", optional_json(s).value_or(nullptr)},
          {"p", optional_json(p).value_or(nullptr)},
          {"ell", ells},
          {"fit-t0", optional_json(fit_t0).value_or(nullptr)},
          {"fit-t1", optional_json(fit_t1).value_or(nullptr)},
          {"tolerance", tolerance},
          {"samples", samples},
          {"besov", besov},
          {"linear-check", linear_check},
          {"save-trajectory", save_trajectory},
          {"inputs", in}};
}

// ------------------------------------------------------------------ parsing

std::optional<RunConfig> parse_run_config(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Decay-rate laboratory for the two-fluid Euler-Poisson system", "epdecay"};
  app.set_config("--config", "", "configuration file (TOML/INI); flags override its values");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  RunConfig c;
  std::string output = c.output.string();
  double s = 0.0, p = 0.0, t0 = 0.0, t1 = 0.0;
  std::vector<std::string> inputs;
  bool no_linear_check = false;

  auto* o_output = app.add_option("-o,--output", output, "output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  auto* o_dim = app.add_option("--dim", c.dim, "spatial dimension of the periodic grid");
  auto* o_points = app.add_option("--points", c.points, "grid points per axis (even)");
  auto* o_length = app.add_option("--length", c.length, "box side length");
  app.add_option("--gamma", c.gamma, "pressure exponent")->capture_default_str();
  auto* o_amp = app.add_option("--amplitude", c.amplitude, "peak density perturbation");
  auto* o_mass = app.add_option("--mass", c.mass, "mass of each gaussian-mass bump");
  auto* o_init = app.add_option("--initial", c.initial, "gaussian-mass | well-prepared | random-band");
  auto* o_mode = app.add_option("--mode", c.mode, "nonlinear | linear_full | linear_difference");
  auto* o_dt = app.add_option("--dt", c.dt, "time step bound");
  auto* o_tf = app.add_option("--final-time", c.final_time, "final time");
  auto* o_snap = app.add_option("--snapshot-interval", c.snapshot_interval, "time between snapshots");
  auto* o_s = app.add_option("--s", s, "regularity index s in (0, 3/2]");
  auto* o_p = app.add_option("--p", p, "Lebesgue exponent p in [1, 2)");
  o_s->excludes(o_p);
  auto* o_ell = app.add_option("--ell", c.ells, "derivative orders, comma separated")->delimiter(',');
  auto* o_t0 = app.add_option("--fit-t0", t0, "fit window start");
  auto* o_t1 = app.add_option("--fit-t1", t1, "fit window end");
  auto* o_tol = app.add_option("--tolerance", c.tolerance, "exponent tolerance");
  auto* o_samples = app.add_option("--samples", c.samples, "random samples per property");
  app.add_flag("--besov", c.besov, "also fit annulus-restricted Besov norms (linear-decay)");
  app.add_flag("--no-linear-check", no_linear_check, "skip the matrix-exponential cross-check (simulate)");
  app.add_flag("--save-trajectory", c.save_trajectory, "write trajectory.bin (simulate)");

  for (const auto& [name, help] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    if (name == "report") sub->add_option("inputs", inputs, "result directories or report.json files");
  }
  (void)o_output;

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, out);
    return std::nullopt;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, out);
    return std::nullopt;
  } catch (const CLI::ConfigError& e) {
    throw UsageError(std::string("configuration file: ") + e.what());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  c.command = app.get_subcommands().front()->get_name();
  c.output = output;
  c.linear_check = !no_linear_check;
  if (*o_s) c.s = s;
  if (*o_p) c.p = p;
  if (*o_t0) c.fit_t0 = t0;
  if (*o_t1) c.fit_t1 = t1;
  for (const auto& in : inputs) c.inputs.emplace_back(in);

  const Defaults d = defaults_for(c.command);
  if (!*o_dim) c.dim = d.dim;
  if (!*o_points) c.points = d.points;
  if (!*o_length) c.length = d.length;
  if (!*o_amp) c.amplitude = d.amplitude;
  if (!*o_mass) c.mass = d.mass;
  if (!*o_init) c.initial = d.initial;
  if (!*o_mode) c.mode = d.mode;
  if (!*o_dt) c.dt = d.dt;
  if (!*o_tf) c.final_time = d.final_time;
  if (!*o_snap) c.snapshot_interval = d.snapshot_interval;
  if (!*o_ell) c.ells = d.ells;
  if (!*o_tol) c.tolerance = d.tolerance;
  if (!*o_samples) c.samples = d.samples;
  if (c.command == "linear-decay" && !c.s && !c.p) c.s = 1.5;
  validate(c);
  return c;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, int (*)(const RunConfig&, std::ostream&, std::ostream&)> table = {
      {"verify-symbols", cmd_verify_symbols}, {"linear-decay", cmd_linear_decay},
      {"difference-decay", cmd_difference_decay}, {"simulate", cmd_simulate},
      {"lp-test", cmd_lp_test}, {"report", cmd_report},
  };
  const auto it = table.find(config.command);
  if (it == table.end()) throw UsageError("command: unknown '" + config.command + "'");
  return it->second(config, out, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const std::optional<RunConfig> config = parse_run_config(args, out);
    if (!config) return kExitPass;
    return execute(*config, out, err);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << " (t = " << e.time() << ", stage " << e.stage() << ")\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace epdecay
