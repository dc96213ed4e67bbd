#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "epdecay/lp_besov.hpp"
#include "epdecay/radial_quadrature.hpp"
#include "epdecay/spectral_solver.hpp"

namespace epdecay {

/// Critical regularity of the three-dimensional theory.
inline constexpr double kCriticalRegularity = 2.5;

enum class Provenance { Quadrature, GridSolver };
std::string to_string(Provenance p);

struct NormSeries {
  std::vector<double> times;
  std::vector<double> values;
  /// e.g. "l2:densities_field:ell=0".
  std::string quantity;
  NormGroup group = NormGroup::DensitiesField;
  double ell = 0.0;
  std::optional<BesovSpec> besov;
  Provenance provenance = Provenance::Quadrature;
  /// (L / 2 pi)^2 for grid provenance, infinity otherwise.
  double crossover = std::numeric_limits<double>::infinity();
};

std::string quantity_label(NormGroup group, double ell, const std::optional<BesovSpec>& besov);

/// ||Lambda^ell group|| at every snapshot: L^2 (mean mode excluded) or the
/// requested Besov norm via the grid's dyadic partition. Throws DomainError
/// for ell < 0 when a component of the group has a nonzero mean.
NormSeries norm_series(const Trajectory& trajectory, NormGroup group, double ell,
                       const std::optional<BesovSpec>& besov = std::nullopt);
NormSeries norm_series(const RadialEvolution& evolution, NormGroup group, double ell,
                       const std::optional<BesovSpec>& besov = std::nullopt);

enum class FitModel { Power, Exponential };
std::string to_string(FitModel m);

struct FitWindow {
  double t0 = 0.0;
  double t1 = 0.0;
};

/// Quadrature default [1e2, 1e4]; grid default [5, min(40, 0.8 crossover)].
FitWindow default_window(Provenance provenance, double crossover = std::numeric_limits<double>::infinity());

struct DecayFit {
  FitModel model = FitModel::Power;
  /// Power: slope of log v against log(1 + t) (negative for decay).
  /// Exponential: rate r of v ~ e^{-r t} (positive for decay).
  double exponent = 0.0;
  double standard_error = 0.0;
  double r_squared = 0.0;
  FitWindow window;
  int points = 0;
  Provenance provenance = Provenance::Quadrature;
  double crossover = std::numeric_limits<double>::infinity();
  std::string quantity;
};

/// Least squares on (log(1+t), log v) or (t, log v) over the window.
/// Throws FitError with fewer than 10 points, a window outside the series,
/// a grid window past the crossover time, or nonpositive values.
DecayFit fit_decay(const NormSeries& series, FitModel model, const FitWindow& window);

/// Component groups of the rate tables.
enum class TheoryGroup { DensitiesField, VelocitiesDifference };
std::string to_string(TheoryGroup g);

/// Regularity of the data: homogeneous B^{-s}_{2,inf} with s in (0, 3/2],
/// or L^p with p in [1, 2).
struct Regime {
  enum class Kind { S, P };
  Kind kind = Kind::S;
  double value = 1.5;

  static Regime s(double v) { return {Kind::S, v}; }
  static Regime p(double v) { return {Kind::P, v}; }
  /// s = 3 (1/p - 1/2) for the p regime.
  double equivalent_s() const;
  std::string label() const;
};

/// gamma_{p,2} = (3/2)(1/p - 1/2).
double gamma_p2(double p);

/// Predicted exponent of (1+t): densities/E -(s+ell)/2 or -gamma_{p,2} - ell/2;
/// velocities and n_e - n_i -(s+ell+1)/2 or -gamma_{p,2} - (ell+1)/2.
/// ell must lie in [0, s_c - 1] (densities) or [0, s_c - 2] (velocities);
/// `linear` widens the velocity range to [0, s_c - 1], where the linear
/// flow still obeys the formula. Throws DomainError otherwise.
double theory_exponent(TheoryGroup group, double ell, const Regime& regime, bool linear = false);

std::string theory_key(TheoryGroup group, double ell, const Regime& regime);
using TheoryTable = std::map<std::string, double>;
TheoryTable theory_table(const std::vector<TheoryGroup>& groups, const std::vector<double>& ells, const Regime& regime,
                         bool linear = false);

struct EnergyFunctionals {
  std::vector<double> times;
  std::vector<double> e0;
  std::vector<double> e1;
  std::vector<double> e2;
  std::vector<double> e;
  double s = 1.5;
  /// Sampled ell grids (the endpoint terms use homogeneous B^0_{2,1}).
  std::vector<double> ell_grid_e1;
  std::vector<double> ell_grid_e2;
  /// ||w(0)||_{B^{s_c}_{2,1}} + ||w(0)||_{hom. B^{-s}_{2,inf}}.
  double m0 = 0.0;
};

/// Running suprema of the time-weighted Besov norms, with ell sampled on
/// {0, 1/2, 1} plus the s_c - 1 endpoint (E1) and {0} plus the s_c - 2
/// endpoint (E2). Norms exclude the mean mode.
EnergyFunctionals energy_functionals(const Trajectory& trajectory, double s);

struct ReportEntry {
  std::string key;
  double predicted = 0.0;
  double fitted = 0.0;
  double standard_error = 0.0;
  double tolerance = 0.0;
  double deviation = 0.0;
  FitWindow window;
  bool pass = false;
  std::string note;
};

struct Report {
  std::vector<ReportEntry> entries;
  bool all_pass() const;
  nlohmann::json to_json() const;
  std::string summary() const;
};

/// Pairs fits with predictions by key; |fitted - predicted| <= tolerance
/// passes. Throws ReportError when the fit set is empty or keys differ.
Report compile_report(const std::map<std::string, DecayFit>& fits, const TheoryTable& table, double tolerance);

}  // namespace epdecay
