#include <cmath>
#include <numbers>

#include "doctest.h"

#include "epdecay/decay_lab.hpp"
#include "epdecay/errors.hpp"

using namespace epdecay;

namespace {

constexpr double kPi = std::numbers::pi;

NormSeries synthetic(double t0, double t1, int n, double (*f)(double)) {
  NormSeries s;
  for (int i = 0; i < n; ++i) {
    double t = t0 + (t1 - t0) * i / (n - 1);
    s.times.push_back(t);
    s.values.push_back(f(t));
  }
  return s;
}

SolverConfig mode_config() {
  SolverConfig c;
  c.grid = Grid(3, 8, 2.0 * kPi);
  c.mode = SolverMode::LinearFull;
  c.dt = 0.01;
  c.final_time = 2.0;
  c.snapshot_interval = 0.5;
  return c;
}

}  // namespace

TEST_CASE("norm series of a zero trajectory") {
  auto c = mode_config();
  auto t = run(c, SpectralState::zeros(c.grid));
  auto s = norm_series(t, NormGroup::DensitiesField, 0.0);
  for (double v : s.values) CHECK(v == 0.0);
  CHECK(s.provenance == Provenance::GridSolver);
  CHECK(s.crossover == doctest::Approx(1.0));
}

TEST_CASE("single decaying mode and derivative scaling") {
  auto c = mode_config();
  c.mode = SolverMode::LinearDifference;
  // A pure transverse relative velocity decays exactly like e^{-t}, and the
  // weighted energy sqrt of the difference system is its amplitude.
  std::array<Complex, 8> coef{};
  coef[SpectralState::kUe + 1] = 1e-2;
  auto t = run_difference_linear(c, single_mode_state(c.grid, {2, 0, 0}, coef));
  auto s0 = norm_series(t, NormGroup::NonDegenerate, 0.0);
  auto s1 = norm_series(t, NormGroup::NonDegenerate, 1.0);
  const double a0 = s0.values[0];
  CHECK(a0 > 0.0);
  for (std::size_t i = 0; i < s0.values.size(); ++i) {
    CHECK(std::abs(s0.values[i] - a0 * std::exp(-t.times[i])) <= 1e-10 * a0);
    CHECK(s1.values[i] == doctest::Approx(2.0 * s0.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("norm series rejects negative order on fields with a mean") {
  auto c = mode_config();
  c.initial.kind = InitialKind::GaussianMass;
  c.grid = Grid(3, 16, 32.0);
  c.dt = 0.05;
  c.final_time = 0.5;
  c.snapshot_interval = 0.5;
  c.initial.mass = 1e-2;
  auto t = run(c);
  CHECK_THROWS_AS(norm_series(t, NormGroup::DensitiesField, -0.5), DomainError);
}

TEST_CASE("synthetic fits recover exact exponents") {
  auto p = synthetic(1.0, 100.0, 50, [](double t) { return std::pow(1.0 + t, -0.75); });
  auto fp = fit_decay(p, FitModel::Power, {1.0, 100.0});
  CHECK(std::abs(fp.exponent + 0.75) <= 1e-6);
  CHECK(fp.r_squared == doctest::Approx(1.0));

  auto e = synthetic(0.0, 20.0, 50, [](double t) { return 3.0 * std::exp(-0.5 * t); });
  auto fe = fit_decay(e, FitModel::Exponential, {0.0, 20.0});
  CHECK(std::abs(fe.exponent - 0.5) <= 1e-6);
}

TEST_CASE("fit errors") {
  auto p = synthetic(1.0, 100.0, 50, [](double t) { return std::pow(1.0 + t, -0.75); });
  CHECK_THROWS_AS(fit_decay(p, FitModel::Power, {200.0, 300.0}), FitError);
  CHECK_THROWS_AS(fit_decay(p, FitModel::Power, {10.0, 5.0}), FitError);
  CHECK_THROWS_AS(fit_decay(p, FitModel::Power, {1.0, 5.0}), FitError);
  p.values[20] = 0.0;
  CHECK_THROWS_AS(fit_decay(p, FitModel::Power, {1.0, 100.0}), FitError);
  auto g = synthetic(0.0, 40.0, 50, [](double t) { return std::exp(-t); });
  g.provenance = Provenance::GridSolver;
  g.crossover = 20.0;
  CHECK_THROWS_AS(fit_decay(g, FitModel::Exponential, {5.0, 30.0}), FitError);
}

TEST_CASE("quadrature density series decays like (1+t)^{-3/4}") {
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(std::pow(10.0, 2.0 + 2.0 * i / 40.0));
  times.insert(times.begin(), 0.0);
  RadialEvolution ev(RadialProfile::gaussian_mass(), times);
  auto s = norm_series(ev, NormGroup::DensitiesField, 0.0);
  auto f = fit_decay(s, FitModel::Power, default_window(Provenance::Quadrature));
  CHECK(std::abs(f.exponent + 0.75) <= 0.05);
}

TEST_CASE("theory exponents") {
  CHECK(theory_exponent(TheoryGroup::DensitiesField, 0.0, Regime::p(1.0)) == doctest::Approx(-0.75));
  CHECK(theory_exponent(TheoryGroup::VelocitiesDifference, 0.0, Regime::p(1.0)) == doctest::Approx(-1.25));
  CHECK(theory_exponent(TheoryGroup::DensitiesField, 1.0, Regime::s(1.5)) == doctest::Approx(-1.25));
  CHECK(gamma_p2(1.0) == doctest::Approx(0.75));
  CHECK(Regime::p(1.0).equivalent_s() == doctest::Approx(1.5));
  CHECK_THROWS_AS(theory_exponent(TheoryGroup::DensitiesField, 1.6, Regime::s(1.5)), DomainError);
  CHECK_THROWS_AS(theory_exponent(TheoryGroup::VelocitiesDifference, 0.6, Regime::s(1.5)), DomainError);
  CHECK_NOTHROW(theory_exponent(TheoryGroup::VelocitiesDifference, 1.0, Regime::s(1.5), true));
  CHECK_THROWS_AS(theory_exponent(TheoryGroup::DensitiesField, -0.1, Regime::s(1.5)), DomainError);
  CHECK_THROWS_AS(theory_exponent(TheoryGroup::DensitiesField, 0.0, Regime::s(2.0)), DomainError);
  CHECK_THROWS_AS(theory_exponent(TheoryGroup::DensitiesField, 0.0, Regime::p(2.0)), DomainError);
}

TEST_CASE("energy functionals") {
  auto c = mode_config();
  auto zero = energy_functionals(run(c, SpectralState::zeros(c.grid)), 1.5);
  for (double v : zero.e) CHECK(v == 0.0);
  CHECK(zero.m0 == 0.0);

  c.mode = SolverMode::Nonlinear;
  c.initial.kind = InitialKind::RandomBand;
  c.initial.amplitude = 1e-2;
  c.dt = 0.02;
  auto f = energy_functionals(run(c), 1.0);
  for (std::size_t i = 1; i < f.times.size(); ++i) {
    CHECK(f.e0[i] >= f.e0[i - 1]);
    CHECK(f.e1[i] >= f.e1[i - 1]);
    CHECK(f.e2[i] >= f.e2[i - 1]);
    CHECK(f.e[i] == doctest::Approx(f.e1[i] + f.e2[i]));
  }
  CHECK(f.m0 > 0.0);
  CHECK_THROWS_AS(energy_functionals(run(c), 2.0), DomainError);
}

TEST_CASE("report compilation") {
  DecayFit good;
  good.exponent = -0.76;
  DecayFit bad;
  bad.exponent = -0.50;
  TheoryTable table{{"a", -0.75}};
  auto pass = compile_report({{"a", good}}, table, 0.05);
  CHECK(pass.all_pass());
  auto fail = compile_report({{"a", bad}}, table, 0.05);
  CHECK_FALSE(fail.all_pass());
  CHECK(fail.entries[0].deviation == doctest::Approx(0.25));
  CHECK_THROWS_AS(compile_report({}, table, 0.05), ReportError);
  CHECK_THROWS_WITH_AS(compile_report({{"b", good}}, table, 0.05), doctest::Contains("'a'"), ReportError);
  CHECK(pass.to_json()["all_pass"] == true);
}
