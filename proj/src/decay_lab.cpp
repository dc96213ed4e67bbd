#include "epdecay/decay_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "epdecay/errors.hpp"
#include "epdecay/trajectory_io.hpp"

namespace epdecay {

namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

using Group = std::vector<SpectralField>;

/// Grid components of a group at one snapshot. For ell >= 0 the mean mode is
/// dropped (it is the box's image of mass at xi = 0, which no multiplier
/// |xi|^ell resolves); for ell < 0 it is kept so the caller can reject it.
Group grid_components(const Trajectory& t, std::size_t i, NormGroup group, bool drop_mean) {
  const SpectralState& s = t.states[i];
  const SpectralVectorField& e = t.fields[i];
  Group g;
  auto diff = [&] {
    SpectralField d(s.sigma_e().size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = s.sigma_e()[k] - s.sigma_i()[k];
    return d;
  };
  switch (group) {
    case NormGroup::DensitiesField:
      g = {s.sigma_e(), s.sigma_i(), e[0], e[1], e[2]};
      break;
    case NormGroup::Velocities:
      g = {s.u_e(0), s.u_e(1), s.u_e(2), s.u_i(0), s.u_i(1), s.u_i(2)};
      break;
    case NormGroup::DensityDifference:
      g = {diff()};
      break;
    case NormGroup::NonDegenerate:
      g = {s.u_e(0), s.u_e(1), s.u_e(2), s.u_i(0), s.u_i(1), s.u_i(2), diff()};
      break;
  }
  if (drop_mean)
    for (auto& f : g) f[0] = 0.0;
  return g;
}

Group full_state(const Trajectory& t, std::size_t i) {
  Group g;
  for (const auto& f : t.states[i].c) g.push_back(f);
  for (const auto& f : t.fields[i]) g.push_back(f);
  for (auto& f : g) f[0] = 0.0;
  return g;
}

Group velocities(const Trajectory& t, std::size_t i) { return grid_components(t, i, NormGroup::Velocities, true); }

std::vector<std::span<const Complex>> spans(const Group& g) {
  return std::vector<std::span<const Complex>>(g.begin(), g.end());
}

}  // namespace

std::string to_string(Provenance p) { return p == Provenance::Quadrature ? "quadrature" : "grid"; }

std::string to_string(FitModel m) { return m == FitModel::Power ? "power" : "exponential"; }

std::string to_string(TheoryGroup g) {
  return g == TheoryGroup::DensitiesField ? "densities_field" : "velocities_difference";
}

std::string quantity_label(NormGroup group, double ell, const std::optional<BesovSpec>& besov) {
  std::string norm = "l2";
  if (besov)
    norm = std::string(besov->homogeneous ? "hbesov" : "besov") + "(s=" + short_number(besov->s) +
           ",r=" + (besov->r == SumIndex::One ? "1" : "inf") + ")";
  return norm + ":" + to_string(group) + ":ell=" + short_number(ell);
}

NormSeries norm_series(const Trajectory& trajectory, NormGroup group, double ell,
                       const std::optional<BesovSpec>& besov) {
  NormSeries out;
  out.times = trajectory.times;
  out.group = group;
  out.ell = ell;
  out.besov = besov;
  out.provenance = Provenance::GridSolver;
  out.crossover = trajectory.grid().crossover_time();
  out.quantity = quantity_label(group, ell, besov);
  const Grid& grid = trajectory.grid();
  std::optional<DyadicPartition> partition;
  if (besov) partition.emplace(DyadicPartition::covering(grid));

  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const Group g = grid_components(trajectory, i, group, ell >= 0.0);
    if (ell < 0.0)
      for (const auto& f : g)
        if (std::abs(f[0]) > 0.0)
          throw DomainError("norm_series: ell < 0 requires zero-mean components (" + to_string(group) + ")");
    const auto view = spans(g);
    out.values.push_back(besov ? besov_norm(*partition, view, *besov, ell) : derivative_l2_norm(grid, view, ell));
  }
  return out;
}

NormSeries norm_series(const RadialEvolution& evolution, NormGroup group, double ell,
                       const std::optional<BesovSpec>& besov) {
  NormSeries out;
  out.times = evolution.times();
  out.group = group;
  out.ell = ell;
  out.besov = besov;
  out.provenance = Provenance::Quadrature;
  out.quantity = quantity_label(group, ell, besov);
  out.values = besov ? evolution.besov_norms(group, ell, *besov) : evolution.l2_norms(group, ell);
  return out;
}

FitWindow default_window(Provenance provenance, double crossover) {
  if (provenance == Provenance::Quadrature) return {1e2, 1e4};
  return {5.0, std::min(40.0, 0.8 * crossover)};
}

DecayFit fit_decay(const NormSeries& series, FitModel model, const FitWindow& window) {
  if (series.times.size() != series.values.size()) throw FitError("fit_decay: times and values differ in length");
  if (series.times.empty()) throw FitError("fit_decay: empty series");
  if (!(window.t0 < window.t1)) throw FitError("fit_decay: empty window");
  const double slack = 1e-9 * std::max(1.0, std::abs(window.t1));
  if (window.t0 < series.times.front() - slack || window.t1 > series.times.back() + slack)
    throw FitError("fit_decay: window [" + short_number(window.t0) + ", " + short_number(window.t1) +
                   "] lies outside the series range [" + short_number(series.times.front()) + ", " +
                   short_number(series.times.back()) + "]");
  if (series.provenance == Provenance::GridSolver && window.t1 > series.crossover + slack)
    throw FitError("fit_decay: grid window ends after the crossover time " + short_number(series.crossover));

  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < window.t0 - slack || t > window.t1 + slack) continue;
    const double v = series.values[i];
    if (!(v > 0.0) || !std::isfinite(v))
      throw FitError("fit_decay: nonpositive value " + short_number(v) + " at t = " + short_number(t));
    x.push_back(model == FitModel::Power ? std::log1p(t) : t);
    y.push_back(std::log(v));
  }
  const auto n = static_cast<double>(x.size());
  if (x.size() < 10) throw FitError("fit_decay: " + std::to_string(x.size()) + " points in window (need >= 10)");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit_decay: degenerate abscissae");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ssr += r * r;
  }

  DecayFit fit;
  fit.model = model;
  fit.exponent = model == FitModel::Power ? slope : -slope;
  fit.standard_error = std::sqrt(ssr / std::max(n - 2.0, 1.0) / sxx);
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  fit.window = window;
  fit.points = static_cast<int>(x.size());
  fit.provenance = series.provenance;
  fit.crossover = series.crossover;
  fit.quantity = series.quantity;
  return fit;
}

double gamma_p2(double p) { return 1.5 * (1.0 / p - 0.5); }

double Regime::equivalent_s() const { return kind == Kind::S ? value : 2.0 * gamma_p2(value); }

std::string Regime::label() const { return (kind == Kind::S ? "s=" : "p=") + short_number(value); }

double theory_exponent(TheoryGroup group, double ell, const Regime& regime, bool linear) {
  if (regime.kind == Regime::Kind::S && !(regime.value > 0.0 && regime.value <= 1.5))
    throw DomainError("theory_exponent: s must lie in (0, 3/2]");
  if (regime.kind == Regime::Kind::P && !(regime.value >= 1.0 && regime.value < 2.0))
    throw DomainError("theory_exponent: p must lie in [1, 2)");
  const bool densities = group == TheoryGroup::DensitiesField;
  const double ell_max = (densities || linear) ? kCriticalRegularity - 1.0 : kCriticalRegularity - 2.0;
  if (!(ell >= 0.0 && ell <= ell_max))
    throw DomainError("theory_exponent: ell = " + short_number(ell) + " outside [0, " + short_number(ell_max) +
                      "] for " + to_string(group));
  const double shift = densities ? 0.0 : 1.0;
  if (regime.kind == Regime::Kind::S) return -(regime.value + ell + shift) / 2.0;
  return -gamma_p2(regime.value) - (ell + shift) / 2.0;
}

std::string theory_key(TheoryGroup group, double ell, const Regime& regime) {
  return to_string(group) + ":ell=" + short_number(ell) + ":" + regime.label();
}

TheoryTable theory_table(const std::vector<TheoryGroup>& groups, const std::vector<double>& ells, const Regime& regime,
                         bool linear) {
  TheoryTable table;
  for (TheoryGroup g : groups)
    for (double ell : ells) table[theory_key(g, ell, regime)] = theory_exponent(g, ell, regime, linear);
  return table;
}

EnergyFunctionals energy_functionals(const Trajectory& trajectory, double s) {
  if (!(s > 0.0 && s <= 1.5)) throw DomainError("energy_functionals: s must lie in (0, 3/2]");
  constexpr double sc = kCriticalRegularity;
  EnergyFunctionals out;
  out.s = s;
  out.times = trajectory.times;
  out.ell_grid_e1 = {0.0, 0.5, 1.0, sc - 1.0};
  out.ell_grid_e2 = {0.0, sc - 2.0};
  if (trajectory.size() == 0) return out;
  const DyadicPartition partition = DyadicPartition::covering(trajectory.grid());
  auto inhom = [](double reg) { return BesovSpec{reg, SumIndex::One, false}; };
  const BesovSpec hom0{0.0, SumIndex::One, true};

  const std::size_t n1 = out.ell_grid_e1.size() - 1;
  std::vector<double> sup1(n1, 0.0);
  double sup1_end = 0.0, sup2 = 0.0, sup2_end = 0.0, sup0 = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const double w = 1.0 + trajectory.times[i];
    const Group full = full_state(trajectory, i);
    const auto fv = spans(full);
    const Group vel = velocities(trajectory, i);
    const auto vv = spans(vel);

    sup0 = std::max(sup0, besov_norm(partition, fv, inhom(sc)));
    for (std::size_t j = 0; j < n1; ++j) {
      const double ell = out.ell_grid_e1[j];
      sup1[j] = std::max(sup1[j], std::pow(w, (s + ell) / 2.0) * besov_norm(partition, fv, inhom(sc - 1.0 - ell), ell));
    }
    sup1_end = std::max(sup1_end, std::pow(w, (s + sc - 1.0) / 2.0) * besov_norm(partition, fv, hom0, sc - 1.0));
    sup2 = std::max(sup2, std::pow(w, (s + 1.0) / 2.0) * besov_norm(partition, vv, inhom(sc - 2.0), 0.0));
    sup2_end = std::max(sup2_end, std::pow(w, (s + sc - 1.0) / 2.0) * besov_norm(partition, vv, hom0, sc - 2.0));

    out.e0.push_back(sup0);
    out.e1.push_back(*std::max_element(sup1.begin(), sup1.end()) + sup1_end);
    out.e2.push_back(sup2 + sup2_end);
    out.e.push_back(out.e1.back() + out.e2.back());
    if (i == 0)
      out.m0 = besov_norm(partition, fv, inhom(sc)) + besov_norm(partition, fv, BesovSpec{-s, SumIndex::Infinity, true});
  }
  return out;
}

bool Report::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass; });
}

nlohmann::json Report::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j = {{"key", e.key},
                        {"predicted", e.predicted},
                        {"fitted", e.fitted},
                        {"stderr", e.standard_error},
                        {"window", {e.window.t0, e.window.t1}},
                        {"tolerance", e.tolerance},
                        {"deviation", e.deviation},
                        {"pass", e.pass}};
    if (!e.note.empty()) j["note"] = e.note;
    arr.push_back(j);
  }
  return {{"entries", arr}, {"all_pass", all_pass()}};
}

std::string Report::summary() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-40s predicted %+.4f fitted %+.4f (stderr %.2e) deviation %.4f\n",
                  e.pass ? "PASS" : "FAIL", e.key.c_str(), e.predicted, e.fitted, e.standard_error, e.deviation);
    os << line;
    if (!e.note.empty()) os << "     note: " << e.note << '\n';
  }
  os << (all_pass() ? "all checks passed" : "some checks failed") << '\n';
  return os.str();
}

Report compile_report(const std::map<std::string, DecayFit>& fits, const TheoryTable& table, double tolerance) {
  if (fits.empty()) throw ReportError("compile_report: no fits to report");
  std::vector<std::string> missing;
  for (const auto& [key, _] : fits)
    if (!table.count(key)) missing.push_back("no prediction for '" + key + "'");
  for (const auto& [key, _] : table)
    if (!fits.count(key)) missing.push_back("no fit for '" + key + "'");
  if (!missing.empty()) {
    std::string msg = "compile_report: keys differ:";
    for (const auto& m : missing) msg += " " + m + ";";
    throw ReportError(msg);
  }
  Report report;
  for (const auto& [key, fit] : fits) {
    ReportEntry e;
    e.key = key;
    e.predicted = table.at(key);
    e.fitted = fit.exponent;
    e.standard_error = fit.standard_error;
    e.tolerance = tolerance;
    e.deviation = std::abs(fit.exponent - e.predicted);
    e.window = fit.window;
    e.pass = e.deviation <= tolerance;
    if (fit.provenance == Provenance::GridSolver)
      e.note = "grid provenance: periodic box of crossover time " + short_number(fit.crossover) +
               "; whole-space rates are corroborative only";
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace epdecay
