#include <cmath>
#include <numbers>

#include "doctest.h"

#include "epdecay/decay_lab.hpp"
#include "epdecay/errors.hpp"
#include "epdecay/lp_besov.hpp"
#include "epdecay/spectral_solver.hpp"
#include "epdecay/symbolics.hpp"

using namespace epdecay;

namespace {

constexpr double kPi = std::numbers::pi;

SolverConfig small_config(SolverMode mode, double dt, double final_time, double interval) {
  SolverConfig c;
  c.grid = Grid(3, 16, 2.0 * kPi);
  c.mode = mode;
  c.dt = dt;
  c.final_time = final_time;
  c.snapshot_interval = interval;
  c.initial.kind = InitialKind::RandomBand;
  c.initial.amplitude = 0.05;
  c.initial.seed = 3;
  return c;
}

double state_distance(const SpectralState& a, const SpectralState& b) {
  double d = 0.0;
  for (std::size_t c = 0; c < SpectralState::kComponents; ++c)
    for (std::size_t k = 0; k < a.c[c].size(); ++k) d = std::max(d, std::abs(a.c[c][k] - b.c[c][k]));
  return d;
}

double state_max(const SpectralState& a) {
  double d = 0.0;
  for (const auto& f : a.c)
    for (const auto& v : f) d = std::max(d, std::abs(v));
  return d;
}

StateVector to_eigen(const std::array<Complex, 11>& w) {
  StateVector v;
  for (int i = 0; i < 11; ++i) v(i) = w[static_cast<std::size_t>(i)];
  return v;
}

Eigen::Vector3d xi_of(const Grid& g, std::size_t k) {
  const auto& w = g.wavevector(k);
  return {w[0], w[1], w[2]};
}

// Continuum value of 2^{-3q/2} ||Delta_q sigma|| for the unit Gaussian of unit mass.
double continuum_block(int q) {
  const double lo = 0.75 * std::ldexp(1.0, q), hi = 8.0 / 3.0 * std::ldexp(1.0, q);
  const int n = 20000;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double p = dyadic_multiplier(q, r);
    s += w * r * r * std::exp(-r * r) * p * p;
  }
  s *= h / 3.0;
  return std::sqrt(4.0 * kPi * s / std::pow(2.0 * kPi, 3)) * std::pow(2.0, -1.5 * q);
}

}  // namespace

TEST_CASE("initial data: mass, mean projection, positivity") {
  Grid g(3, 32, 32.0);
  InitialData d;
  d.kind = InitialKind::GaussianMass;
  d.mass = 0.7;
  d.amplitude = 0.01;
  auto s = make_initial_data(g, d);
  SpectralTransform fft(g);
  CHECK(std::abs(box_integral(g, fft.forward(s.sigma_e)) - 0.7) <= 1e-10);
  CHECK(std::abs(box_integral(g, fft.forward(s.sigma_i)) - 0.7) <= 1e-10);

  d.kind = InitialKind::WellPrepared;
  auto w = make_initial_data(g, d);
  CHECK(std::abs(fft.forward(w.sigma_e)[0]) <= 1e-14);
  CHECK(std::abs(fft.forward(w.sigma_i)[0]) <= 1e-14);

  d.kind = InitialKind::RandomBand;
  d.amplitude = 1.5;
  CHECK_THROWS_AS(make_initial_data(g, d), AmplitudeError);
  d.amplitude = -1.0;
  CHECK_THROWS_AS(make_initial_data(g, d), ConfigError);
}

TEST_CASE("Gaussian data: resolved dyadic blocks match the continuum integral") {
  Grid g(3, 64, 32.0);
  InitialData d;
  d.kind = InitialKind::GaussianMass;
  d.mass = 1.0;
  d.amplitude = std::pow(2.0 * kPi, -1.5);  // unit width
  auto s = make_initial_data(g, d);
  SpectralTransform fft(g);
  auto c = fft.forward(s.sigma_e);
  c[0] = 0.0;
  auto p = DyadicPartition::covering(g);
  double norm = besov_norm(p, c, BesovSpec{-1.5, SumIndex::Infinity, true});
  CHECK(std::isfinite(norm));
  CHECK(norm > 0.0);
  // The two coarsest annuli hold only a few lattice modes; from q_min + 2 on
  // every block carries enough modes for the lattice sum to approximate
  // the integral.
  std::span<const Complex> group[] = {c};
  auto blocks = block_norms(p, group, true);
  double grid_sup = 0.0, continuum_sup = 0.0;
  for (int q = p.q_min() + 2; q <= 1; ++q) {
    double v = blocks.values[static_cast<std::size_t>(q - blocks.first_q)] * std::pow(2.0, -1.5 * q);
    CHECK(v == doctest::Approx(continuum_block(q)).epsilon(0.05));
    grid_sup = std::max(grid_sup, v);
    continuum_sup = std::max(continuum_sup, continuum_block(q));
  }
  CHECK(grid_sup == doctest::Approx(continuum_sup).epsilon(0.05));
}

TEST_CASE("single mode construction") {
  Grid g(3, 8, 2.0 * kPi);
  std::array<Complex, 8> coef{};
  coef[0] = 1.0;
  CHECK_THROWS_AS(single_mode_state(g, {0, 0, 0}, coef), DomainError);
  CHECK_THROWS_AS(single_mode_state(g, {-4, 0, 1}, coef), DomainError);
  auto s = single_mode_state(g, {1, 0, 0}, coef);
  CHECK(s.sigma_e()[g.spectral_index({1, 0, 0})] == Complex(1.0));
  CHECK(s.sigma_e()[g.spectral_index({-1, 0, 0})] == Complex(1.0));
}

TEST_CASE("configuration validation") {
  auto c = small_config(SolverMode::Nonlinear, 0.02, 1.0, 0.3);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.snapshot_interval = 0.25;
  CHECK_NOTHROW(c.validate());
  c.dt = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  auto cfl = small_config(SolverMode::Nonlinear, 0.5, 1.0, 0.5);
  CHECK_THROWS_WITH_AS(run(cfl), doctest::Contains("CFL"), ConfigError);
  CHECK(parse_solver_mode(to_string(SolverMode::LinearDifference)) == SolverMode::LinearDifference);
  CHECK(parse_initial_kind(to_string(InitialKind::RandomBand)) == InitialKind::RandomBand);
  CHECK_THROWS_AS(parse_solver_mode("implicit"), ConfigError);
}

TEST_CASE("a zero state stays zero") {
  auto c = small_config(SolverMode::Nonlinear, 0.02, 0.1, 0.1);
  auto zero = PerturbationState::zeros(c.grid);
  auto next = step(zero, c);
  CHECK(max_abs(next.sigma_e) == 0.0);
  CHECK(max_abs(next.u_i[2]) == 0.0);
}

TEST_CASE("RK4 local error order and per-step mass conservation") {
  auto c = small_config(SolverMode::Nonlinear, 0.02, 1.0, 1.0);
  SpectralTransform fft(c.grid);
  auto initial = to_spectral(fft, make_initial_data(c.grid, c.initial));
  Stepper stepper(c);

  auto advance = [&](double dt, int n) {
    SpectralState s = initial;
    for (int i = 0; i < n; ++i) stepper.step(s, i * dt, dt);
    return s;
  };
  const double dt = 0.02;
  // One step of dt and one step of dt/2, each against a fine-step reference.
  double e1 = state_distance(advance(dt, 1), advance(dt / 64.0, 64));
  double e2 = state_distance(advance(dt / 2.0, 1), advance(dt / 64.0, 32));
  double ratio = e1 / e2;
  MESSAGE("one-step error ratio " << ratio);
  CHECK(ratio >= 24.0);
  CHECK(ratio <= 40.0);

  SpectralState s = initial;
  const double m0 = std::abs(s.sigma_e()[0]);
  for (int i = 0; i < 10; ++i) {
    stepper.step(s, i * dt, dt);
    CHECK(std::abs(std::abs(s.sigma_e()[0]) - m0) <= 1e-14 * m0 + 1e-300);
  }
}

TEST_CASE("linear_full single mode follows the matrix exponential") {
  SolverConfig c;
  c.grid = Grid(3, 8, 2.0 * kPi);
  c.mode = SolverMode::LinearFull;
  c.dt = 0.0025;
  c.final_time = 10.0;
  c.snapshot_interval = 1.0;
  for (const auto& m : {std::array<int, 3>{1, 0, 0}, std::array<int, 3>{1, -2, 1}, std::array<int, 3>{0, 1, 3}}) {
    std::array<Complex, 8> coef{Complex(1e-3, 2e-4), Complex(1e-4, 0), Complex(0, -3e-4), Complex(2e-4, 1e-4),
                                Complex(-5e-4, 0), Complex(0, 1e-4), Complex(3e-4, 0), Complex(1e-4, -1e-4)};
    auto init = single_mode_state(c.grid, m, coef);
    auto traj = run(c, init);
    const std::size_t k = c.grid.spectral_index(m);
    const auto xi = xi_of(c.grid, k);
    const StateVector w0 = to_eigen(mode_vector(c.grid, traj.states[0], k));
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      StateVector expect = propagate(xi, w0, traj.times[i]);
      StateVector got = to_eigen(mode_vector(c.grid, traj.states[i], k));
      worst = std::max(worst, (got - expect).norm() / expect.norm());
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("linear_full: per-mode energy is nonincreasing") {
  auto c = small_config(SolverMode::LinearFull, 0.02, 4.0, 0.5);
  auto traj = run(c);
  bool monotone = true;
  for (std::size_t k = 1; k < c.grid.spectral_size(); ++k) {
    double prev = to_eigen(mode_vector(c.grid, traj.states[0], k)).squaredNorm();
    for (std::size_t i = 1; i < traj.size(); ++i) {
      double e = to_eigen(mode_vector(c.grid, traj.states[i], k)).squaredNorm();
      if (e > prev * (1.0 + 1e-12) + 1e-300) monotone = false;
      prev = e;
    }
  }
  CHECK(monotone);
  CHECK(traj.max_constraint_residual() <= 1e-10);
}

TEST_CASE("nonlinear run at small amplitude stays within a quadratic remainder of the linear flow") {
  const double eps = 1e-4;
  auto c = small_config(SolverMode::Nonlinear, 0.025, 10.0, 1.0);
  c.initial.amplitude = eps;
  auto nonlinear = run(c);
  c.mode = SolverMode::LinearFull;
  auto linear = run(c);
  double worst = 0.0;
  for (std::size_t i = 0; i < nonlinear.size(); ++i)
    worst = std::max(worst, state_distance(nonlinear.states[i], linear.states[i]));
  MESSAGE("max mode deviation " << worst << ", initial max mode " << state_max(linear.states[0]));
  CHECK(worst <= 1e3 * eps * eps);
  CHECK(nonlinear.max_mass_drift() <= 1e-10);
}

TEST_CASE("difference system: single-mode decay rate and invariants") {
  SolverConfig c;
  c.grid = Grid(3, 16, 2.0 * kPi);
  c.mode = SolverMode::LinearDifference;
  c.dt = 0.01;
  c.final_time = 30.0;
  c.snapshot_interval = 0.25;
  std::array<Complex, 8> coef{};
  coef[0] = 1e-2;
  auto traj = run_difference_linear(c, single_mode_state(c.grid, {1, 0, 0}, coef));
  NormSeries series;
  series.provenance = Provenance::GridSolver;
  series.times = traj.times;
  for (const auto& d : traj.diagnostics) series.values.push_back(std::sqrt(2.0 * d.difference_energy));
  auto fit = fit_decay(series, FitModel::Exponential, {5.0, 30.0});
  CHECK(fit.exponent == doctest::Approx(0.5).epsilon(0.04));
  for (std::size_t i = 1; i < traj.size(); ++i)
    CHECK(traj.diagnostics[i].difference_energy <= traj.diagnostics[i - 1].difference_energy * (1.0 + 1e-12));

  auto zero = run_difference_linear(c, SpectralState::zeros(c.grid));
  for (const auto& s : zero.states) CHECK(state_max(s) == 0.0);
}

TEST_CASE("difference system preconditions") {
  SolverConfig c;
  c.grid = Grid(3, 8, 2.0 * kPi);
  c.dt = 0.01;
  c.final_time = 0.1;
  c.snapshot_interval = 0.1;
  c.mode = SolverMode::Nonlinear;
  CHECK_THROWS_AS(run_difference_linear(c), PreconditionError);
  c.mode = SolverMode::LinearDifference;
  auto s = SpectralState::zeros(c.grid);
  s.sigma_e()[0] = 0.1;
  CHECK_THROWS_AS(run_difference_linear(c, s), PreconditionError);
}

TEST_CASE("dealiased products agree with a twice finer grid") {
  // The 2/3 rule makes the truncated quadratic products exact: the coarse
  // nonlinear terms equal the fine-grid terms restricted to the coarse band.
  Grid coarse(3, 16, 2.0 * kPi), fine(3, 32, 2.0 * kPi);
  InitialData d;
  d.kind = InitialKind::RandomBand;
  d.amplitude = 0.05;
  d.seed = 9;
  SpectralTransform fc(coarse), ff(fine);
  auto sc = to_spectral(fc, make_initial_data(coarse, d));
  SpectralState sf = SpectralState::zeros(fine);
  for (std::size_t k = 0; k < coarse.spectral_size(); ++k) {
    if (coarse.is_nyquist(k)) continue;
    auto kf = fine.spectral_index(coarse.mode(k));
    for (std::size_t c = 0; c < SpectralState::kComponents; ++c) sf.c[c][kf] = sc.c[c][k];
  }
  // gamma = 2 makes the enthalpy term vanish, leaving only quadratic products.
  NonlinearEvaluator ec(coarse, PressureLaw(2.0), true), ef(fine, PressureLaw(2.0), false);
  SpectralNonlinearity nc = SpectralNonlinearity::zeros(coarse), nf = SpectralNonlinearity::zeros(fine);
  ec.evaluate(sc, nc);
  ef.evaluate(sf, nf);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < coarse.spectral_size(); ++k) {
    if (!coarse.in_dealiased_band(k)) continue;
    auto kf = fine.spectral_index(coarse.mode(k));
    worst = std::max(worst, std::abs(nc.f1e[k] - nf.f1e[kf]));
    scale = std::max(scale, std::abs(nf.f1e[kf]));
    for (int j = 0; j < 3; ++j) {
      worst = std::max(worst, std::abs(nc.f2i[j][k] - nf.f2i[j][kf]));
      scale = std::max(scale, std::abs(nf.f2i[j][kf]));
    }
  }
  CHECK(scale > 0.0);
  CHECK(worst <= 1e-12 * scale);
}
