#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "epdecay/decay_lab.hpp"
#include "epdecay/radial_quadrature.hpp"
#include "epdecay/spectral_solver.hpp"
#include "epdecay/tolerances.hpp"

namespace epdecay {

/// One named pass/fail verdict. `relation` is "<=", ">=", "within" (|value -
/// threshold| <= tolerance) or "info" (always passes; reported only).
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";
  bool pass = false;
  std::string note;
};

struct CheckSet {
  std::string name;
  std::vector<Check> checks;

  Check& at_most(const std::string& check, double value, double threshold, const std::string& note = {});
  Check& at_least(const std::string& check, double value, double threshold, const std::string& note = {});
  Check& within(const std::string& check, double value, double target, double tolerance, const std::string& note = {});
  Check& info(const std::string& check, double value, const std::string& note = {});
  void append(const CheckSet& other);

  bool all_pass() const;
  std::vector<std::string> failing() const;
  const Check& find(const std::string& check) const;
  nlohmann::json to_json() const;
  std::string summary() const;
};

/// Symbol-level invariants: compensator identity, flux symmetry, energy
/// identity, Lyapunov decrement and equivalence, spectral envelope and
/// branch formulas, semigroup bound, rotational covariance, constraint
/// preservation, monotone modified energy.
struct SymbolSuiteOptions {
  int identity_samples = 1000;
  int energy_samples = 10000;
  int lyapunov_samples = 10000;
  int sweep_points = 200;
  double r_lo = 1e-3;
  double r_hi = 1e3;
  double kappa = tolerances::kLyapunovKappa;
  std::uint64_t seed = 1;
};

struct SymbolSuiteResult {
  CheckSet checks;
  /// (r, constrained exponent, r^2/(1+r^2)) over the sweep.
  std::vector<std::array<double, 3>> sweep;
};

SymbolSuiteResult verify_symbols_suite(const SymbolSuiteOptions& options = {});

/// Littlewood-Paley and Besov property suite on a periodic grid.
struct LpSuiteOptions {
  int dim = 3;
  int points = 32;
  double length = 8.0 * 3.14159265358979323846;
  int samples = 100;
  std::uint64_t seed = 1;
};

struct LpSuiteResult {
  CheckSet checks;
  /// Fitted constants (max ratio over the samples) per inequality.
  std::map<std::string, double> constants;
};

LpSuiteResult lp_property_suite(const LpSuiteOptions& options = {});

/// Rate-table identities: p and s = 3(1/p - 1/2) regimes agree and the
/// velocity/density gap is -1/2.
CheckSet theory_consistency_suite();

/// Whole-space linear decay on the radial quadrature path.
struct LinearDecayOptions {
  Regime regime = Regime::s(1.5);
  std::vector<double> ells{0.0, 1.0};
  std::vector<TheoryGroup> groups{TheoryGroup::DensitiesField, TheoryGroup::VelocitiesDifference};
  FitWindow window{1e2, 1e4};
  double tolerance = tolerances::kQuadratureExponent;
  double gap_tolerance = tolerances::kHalfRateGap;
  /// Also fit Lambda^ell in B^{s_c - 1 - ell}_{2,1} (annulus-restricted).
  bool besov = false;
  QuadratureOptions quadrature{};
  /// Sample times: 0 plus log-spaced points with `per_decade` per decade.
  double t_min = 1.0;
  double t_max = 1e4;
  int per_decade = 10;
};

struct LinearDecayResult {
  RadialProfile profile;
  std::vector<NormSeries> series;
  std::map<std::string, DecayFit> fits;
  TheoryTable table;
  Report report;
  CheckSet checks;
};

/// Profile for a regime: Gaussian with mass for s = 3/2 (p = 1), else
/// power_law(s).
RadialProfile regime_profile(const Regime& regime);
/// Norm group measured for a theory group (velocities and the density
/// difference are measured together).
NormGroup measured_group(TheoryGroup group);
std::vector<double> log_times(double t_min, double t_max, int per_decade);

LinearDecayResult linear_decay_experiment(const LinearDecayOptions& options = {});

/// Plasma-oscillation subsystem on the grid: single-mode and broadband data.
struct DifferenceDecayOptions {
  int dim = 3;
  int points = 16;
  double length = 2.0 * 3.14159265358979323846;
  std::array<int, 3> mode{1, 0, 0};
  double amplitude = 1e-2;
  double dt = 0.01;
  double final_time = 30.0;
  double snapshot_interval = 0.25;
  FitWindow window{5.0, 30.0};
  std::uint64_t seed = 1;
  double min_rate = tolerances::kDifferenceMinRate;
  double min_r_squared = tolerances::kDifferenceMinR2;
};

struct DifferenceCase {
  std::string name;
  Trajectory trajectory;
  NormSeries series;
  DecayFit fit;
};

struct DifferenceDecayResult {
  std::vector<DifferenceCase> cases;
  CheckSet checks;
};

DifferenceDecayResult difference_decay_experiment(const DifferenceDecayOptions& options = {});

/// N = 48, L = 64, gaussian-mass data at amplitude 1e-2, dt = 0.08 to T = 40.
SolverConfig default_simulation_config();
/// linear_full at amplitude 1e-4 with mass 1e-2 on the same grid, to T = 10.
SolverConfig default_linear_check_config();

/// Nonlinear grid run with invariant checks, a corroborative density slope,
/// bounded energy functionals and an optional linear matrix-exponential
/// cross-check at small amplitude.
struct SimulateOptions {
  SolverConfig solver = default_simulation_config();
  /// Derivative orders of the recorded norm series (ell = 0 is always included).
  std::vector<double> ells{0.0};
  std::optional<FitWindow> window;
  double target_slope = -0.75;
  double slope_tolerance = tolerances::kGridDecaySlope;
  double energy_growth = tolerances::kEnergyFunctionalGrowth;
  double energy_reference_time = 5.0;
  double s = 1.5;
  bool linear_check = true;
  /// Linear cross-check configuration (mode forced to linear_full).
  SolverConfig linear = default_linear_check_config();
};

struct SimulateResult {
  Trajectory trajectory;
  std::vector<NormSeries> series;
  std::optional<DecayFit> density_fit;
  EnergyFunctionals energy;
  /// max over snapshots of max_k |w_k - exp(-A t) w_k(0)| / max_k |w_k|.
  std::optional<double> linear_error;
  CheckSet checks;
};

/// Per-mode deviation of a linear_full trajectory from the matrix
/// exponential, relative to the largest mode at each snapshot.
double linear_oracle_error(const Trajectory& trajectory);

SimulateResult simulate_experiment(const SimulateOptions& options = {});

}  // namespace epdecay
