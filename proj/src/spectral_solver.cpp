#include "epdecay/spectral_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "epdecay/errors.hpp"
#include "epdecay/random.hpp"

namespace epdecay {

namespace {

constexpr Complex kI{0.0, 1.0};

double sum_squares(const Grid& grid, std::span<const Complex> f, bool skip_mean) {
  return grid.box_volume() * spectral_energy(grid, f, skip_mean);
}

double min_image(double x, double c, double length) {
  double d = x - c;
  d -= length * std::round(d / length);
  return d;
}

RealField gaussian(const Grid& grid, double width) {
  RealField g(grid.real_size());
  const double c = 0.5 * grid.length();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = grid.position(i);
    double r2 = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double dx = min_image(x[static_cast<std::size_t>(d)], c, grid.length());
      r2 += dx * dx;
    }
    g[i] = std::exp(-0.5 * r2 / (width * width));
  }
  return g;
}

void check_fits(const Grid& grid, double width) {
  const double half = 0.5 * grid.length();
  if (std::exp(-0.5 * half * half / (width * width)) > 1e-8)
    throw ConfigError("initial bump of width " + std::to_string(width) + " does not fit a box of length " +
                      std::to_string(grid.length()));
}

VectorField gradient(SpectralTransform& fft, std::span<const double> potential) {
  const SpectralVectorField g = spectral_gradient(fft.grid(), fft.forward(potential));
  VectorField out;
  for (std::size_t j = 0; j < 3; ++j) out[j] = fft.inverse(g[j]);
  return out;
}

double max_speed(const VectorField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u[0].size(); ++i)
    m = std::max(m, std::sqrt(u[0][i] * u[0][i] + u[1][i] * u[1][i] + u[2][i] * u[2][i]));
  return m;
}

void scale_field(RealField& f, double factor) {
  for (double& v : f) v *= factor;
}

void scale_vector(VectorField& u, double factor) {
  for (auto& c : u) scale_field(c, factor);
}

RealField random_band_field(SpectralTransform& fft, Rng& rng, bool zero_mean) {
  const Grid& grid = fft.grid();
  SpectralField c(grid.spectral_size(), Complex{});
  const int n = grid.points();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    bool in_band = !grid.is_nyquist(k);
    for (int m : grid.mode(k)) in_band = in_band && 3 * std::abs(m) < n / 2;
    if (in_band) c[k] = Complex(re, im);
  }
  if (zero_mean) c[0] = 0.0;
  // The inverse transform symmetrizes the self-conjugate plane; a round
  // trip yields a consistent half spectrum.
  RealField f = fft.inverse(c);
  SpectralField h = fft.forward(f);
  if (zero_mean) h[0] = 0.0;
  return fft.inverse(h);
}

void check_positivity(const PerturbationState& s) {
  for (const RealField* f : {&s.sigma_e, &s.sigma_i})
    for (double v : *f)
      if (!(1.0 + v > 0.0)) throw AmplitudeError("initial data violates density positivity (1 + sigma <= 0)");
}

void check_finite(const SpectralState& s, double time, int stage) {
  for (const auto& f : s.c)
    for (const Complex& v : f)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw DivergenceError("time integration produced non-finite values at t = " + std::to_string(time) +
                                  " (stage " + std::to_string(stage) + ")",
                              time, stage);
}

void axpy(SpectralState& y, const SpectralState& x, double a, const SpectralState& base) {
  for (std::size_t c = 0; c < SpectralState::kComponents; ++c) {
    auto& yc = y.c[c];
    const auto& xc = x.c[c];
    const auto& bc = base.c[c];
    for (std::size_t k = 0; k < yc.size(); ++k) yc[k] = bc[k] + a * xc[k];
  }
}

SpectralState to_difference_form(const SpectralState& s) {
  SpectralState d = s;
  for (std::size_t k = 0; k < d.sigma_e().size(); ++k) {
    d.sigma_e()[k] = s.sigma_e()[k] - s.sigma_i()[k];
    d.sigma_i()[k] = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      d.u_e(j)[k] = s.u_e(j)[k] - s.u_i(j)[k];
      d.u_i(j)[k] = 0.0;
    }
  }
  return d;
}

Trajectory integrate(const SolverConfig& config, SpectralState state) {
  config.validate();
  const Grid& grid = config.grid;
  SpectralTransform fft(grid);
  for (auto& f : state.c) {
    if (f.size() != grid.spectral_size()) throw ConfigError("initial state does not match the grid");
    apply_nyquist_filter(grid, f);
  }

  const PerturbationState phys = to_physical(fft, state);
  const double umax = std::max(max_speed(phys.u_e), max_speed(phys.u_i));
  if (config.effective_dt() > config.cfl_limit(umax))
    throw ConfigError("dt = " + std::to_string(config.dt) + " exceeds the CFL bound " +
                      std::to_string(config.cfl_limit(umax)));

  Stepper stepper(config);
  Trajectory traj;
  traj.config = config;
  const int per = config.steps_per_snapshot();
  const double dt = config.effective_dt();
  const int count = config.snapshot_count();

  auto record = [&](double t) {
    SpectralVectorField e;
    constraint_field(grid, state, e);
    traj.times.push_back(t);
    traj.diagnostics.push_back(diagnose(grid, state, e, t));
    traj.states.push_back(state);
    traj.fields.push_back(std::move(e));
  };

  record(0.0);
  long step_index = 0;
  for (int snap = 1; snap <= count; ++snap) {
    for (int s = 0; s < per; ++s) {
      stepper.step(state, step_index * dt, dt);
      ++step_index;
    }
    record(snap * config.snapshot_interval);
  }
  return traj;
}

}  // namespace

std::string to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::Nonlinear: return "nonlinear";
    case SolverMode::LinearFull: return "linear_full";
    case SolverMode::LinearDifference: return "linear_difference";
  }
  return "unknown";
}

SolverMode parse_solver_mode(const std::string& text) {
  for (SolverMode m : {SolverMode::Nonlinear, SolverMode::LinearFull, SolverMode::LinearDifference})
    if (to_string(m) == text) return m;
  throw ConfigError("unknown solver mode '" + text + "'");
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::GaussianMass: return "gaussian-mass";
    case InitialKind::WellPrepared: return "well-prepared";
    case InitialKind::RandomBand: return "random-band";
  }
  return "unknown";
}

InitialKind parse_initial_kind(const std::string& text) {
  for (InitialKind k : {InitialKind::GaussianMass, InitialKind::WellPrepared, InitialKind::RandomBand})
    if (to_string(k) == text) return k;
  throw ConfigError("unknown initial-data kind '" + text + "'");
}

PerturbationState make_initial_data(const Grid& grid, const InitialData& data) {
  if (!(data.amplitude >= 0.0) || !std::isfinite(data.amplitude))
    throw ConfigError("initial amplitude must be nonnegative");
  SpectralTransform fft(grid);
  PerturbationState s = PerturbationState::zeros(grid);
  const double eps = data.amplitude;
  const int n = grid.dim();

  switch (data.kind) {
    case InitialKind::GaussianMass: {
      if (!(eps > 0.0) || !(data.mass > 0.0))
        throw ConfigError("gaussian-mass data needs positive amplitude and mass");
      const double width = std::pow(data.mass / (eps * std::pow(2.0 * std::numbers::pi, 0.5 * n)), 1.0 / n);
      const double widths[2] = {width, 1.25 * width};
      RealField* sig[2] = {&s.sigma_e, &s.sigma_i};
      VectorField* vel[2] = {&s.u_e, &s.u_i};
      for (int a = 0; a < 2; ++a) {
        check_fits(grid, widths[a]);
        RealField g = gaussian(grid, widths[a]);
        double sum = 0.0;
        for (double v : g) sum += v;
        *sig[a] = g;
        scale_field(*sig[a], data.mass / (grid.cell_volume() * sum));
        scale_field(g, eps * width);
        *vel[a] = gradient(fft, g);
      }
      break;
    }
    case InitialKind::WellPrepared: {
      const double width = grid.length() / 12.0;
      const double widths[2] = {width, 1.25 * width};
      RealField* sig[2] = {&s.sigma_e, &s.sigma_i};
      VectorField* vel[2] = {&s.u_e, &s.u_i};
      for (int a = 0; a < 2; ++a) {
        RealField g = gaussian(grid, widths[a]);
        SpectralField h = fft.forward(g);
        h[0] = 0.0;
        RealField f = fft.inverse(h);
        const double peak = max_abs(f);
        // Re-projecting after scaling keeps the mean exactly zero.
        SpectralField hs = fft.forward(f);
        for (auto& c : hs) c *= peak > 0.0 ? eps / peak : 0.0;
        hs[0] = 0.0;
        *sig[a] = fft.inverse(hs);
        scale_field(g, eps * width);
        *vel[a] = gradient(fft, g);
      }
      break;
    }
    case InitialKind::RandomBand: {
      Rng rng(data.seed);
      RealField* sig[2] = {&s.sigma_e, &s.sigma_i};
      VectorField* vel[2] = {&s.u_e, &s.u_i};
      for (int a = 0; a < 2; ++a) {
        RealField f = random_band_field(fft, rng, true);
        const double peak = max_abs(f);
        scale_field(f, peak > 0.0 ? eps / peak : 0.0);
        *sig[a] = std::move(f);
        VectorField u = gradient(fft, random_band_field(fft, rng, true));
        const double umax = max_speed(u);
        scale_vector(u, umax > 0.0 ? eps / umax : 0.0);
        *vel[a] = std::move(u);
      }
      break;
    }
  }
  check_positivity(s);
  return s;
}

SpectralState single_mode_state(const Grid& grid, const std::array<int, 3>& mode,
                                const std::array<Complex, 8>& coefficients) {
  const std::size_t k = grid.spectral_index(mode);
  if (k == 0) throw DomainError("single_mode_state: the mean mode is not a wave");
  if (grid.is_nyquist(k)) throw DomainError("single_mode_state: Nyquist modes are not resolved");
  SpectralState s = SpectralState::zeros(grid);
  for (std::size_t c = 0; c < 8; ++c) s.c[c][k] = coefficients[c];
  const int last = mode[static_cast<std::size_t>(grid.dim() - 1)];
  if (last == 0) {
    std::array<int, 3> partner{0, 0, 0};
    for (int d = 0; d < grid.dim(); ++d) partner[static_cast<std::size_t>(d)] = -mode[static_cast<std::size_t>(d)];
    const std::size_t kp = grid.spectral_index(partner);
    for (std::size_t c = 0; c < 8; ++c) s.c[c][kp] = std::conj(coefficients[c]);
    if (kp == k)
      for (std::size_t c = 0; c < 8; ++c) s.c[c][k] = coefficients[c].real();
  }
  return s;
}

double SolverConfig::cfl_limit(double max_velocity) const {
  return 0.5 / (grid.max_wavenumber() * (1.0 + max_velocity) + 1.0);
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(final_time > 0.0) || !std::isfinite(final_time)) throw ConfigError("final time must be positive");
  if (!(snapshot_interval > 0.0) || snapshot_interval > final_time * (1.0 + 1e-12))
    throw ConfigError("snapshot interval must lie in (0, final time]");
  const double ratio = final_time / snapshot_interval;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw ConfigError("final time must be a whole number of snapshot intervals");
}

int SolverConfig::steps_per_snapshot() const {
  return std::max(1, static_cast<int>(std::ceil(snapshot_interval / dt - 1e-9)));
}

double SolverConfig::effective_dt() const { return snapshot_interval / steps_per_snapshot(); }

int SolverConfig::snapshot_count() const { return static_cast<int>(std::round(final_time / snapshot_interval)); }

void constraint_field(const Grid& grid, const SpectralState& state, SpectralVectorField& e) {
  const std::size_t n = grid.spectral_size();
  for (auto& c : e) c.assign(n, Complex{});
  for (std::size_t k = 1; k < n; ++k) {
    if (grid.is_nyquist(k)) continue;
    const Complex phi = -(state.sigma_e()[k] - state.sigma_i()[k]) / grid.wavenumber_squared(k);
    const Vec3& xi = grid.wavevector(k);
    for (std::size_t j = 0; j < 3; ++j) e[j][k] = kI * xi[j] * phi;
  }
}

SnapshotDiagnostics diagnose(const Grid& grid, const SpectralState& state, const SpectralVectorField& e,
                             double time) {
  SnapshotDiagnostics d;
  d.time = time;
  d.mass_e = box_integral(grid, state.sigma_e());
  d.mass_i = box_integral(grid, state.sigma_i());

  const std::size_t n = grid.spectral_size();
  SpectralField diff(n);
  for (std::size_t k = 0; k < n; ++k) diff[k] = state.sigma_e()[k] - state.sigma_i()[k];
  double vel = 0.0, field = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    vel += sum_squares(grid, state.u_e(j), true) + sum_squares(grid, state.u_i(j), true);
    field += sum_squares(grid, e[j], true);
  }
  const double se = sum_squares(grid, state.sigma_e(), true);
  const double si = sum_squares(grid, state.sigma_i(), true);
  const double dd = sum_squares(grid, diff, true);
  d.group_norms[static_cast<std::size_t>(NormGroup::DensitiesField)] = std::sqrt(se + si + field);
  d.group_norms[static_cast<std::size_t>(NormGroup::Velocities)] = std::sqrt(vel);
  d.group_norms[static_cast<std::size_t>(NormGroup::DensityDifference)] = std::sqrt(dd);
  d.group_norms[static_cast<std::size_t>(NormGroup::NonDegenerate)] = std::sqrt(vel + dd);

  const SpectralField div = spectral_divergence(grid, e);
  SpectralField residual(n);
  for (std::size_t k = 0; k < n; ++k) residual[k] = div[k] - diff[k];
  d.constraint_residual = l2_norm(grid, residual, true);
  const double e_norm = std::sqrt(field);
  d.curl_residual = e_norm > 0.0 ? vector_l2_norm(grid, spectral_curl(grid, e)) / e_norm : 0.0;

  double full = sum_squares(grid, state.sigma_e(), false) + sum_squares(grid, state.sigma_i(), false) + field;
  for (std::size_t j = 0; j < 3; ++j)
    full += sum_squares(grid, state.u_e(j), false) + sum_squares(grid, state.u_i(j), false);
  d.energy = 0.5 * full;
  SpectralField udiff(n);
  double ud = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < n; ++k) udiff[k] = state.u_e(j)[k] - state.u_i(j)[k];
    ud += sum_squares(grid, udiff, false);
  }
  d.difference_energy = 0.5 * (sum_squares(grid, diff, false) + ud + 2.0 * field);

  SpectralTransform fft(grid);
  for (const SpectralField* f : {&state.sigma_e(), &state.sigma_i()}) {
    const RealField sigma = fft.inverse(*f);
    d.min_density = std::min(d.min_density, 1.0 + *std::min_element(sigma.begin(), sigma.end()));
  }
  return d;
}

Stepper::Stepper(const SolverConfig& config)
    : config_(config), evaluator_(config.grid, config.law, config.dealias) {
  config_.validate();
  nonlinear_ = SpectralNonlinearity::zeros(config_.grid);
  for (auto& k : k_) k = SpectralState::zeros(config_.grid);
  stage_state_ = SpectralState::zeros(config_.grid);
}

void Stepper::rhs(const SpectralState& s, SpectralState& out, double time, int stage) {
  const Grid& g = config_.grid;
  const std::size_t n = g.spectral_size();
  const SolverMode mode = config_.mode;
  if (mode == SolverMode::Nonlinear) {
    try {
      evaluator_.evaluate(s, nonlinear_);
    } catch (const DomainError& e) {
      throw DivergenceError(std::string(e.what()) + " at t = " + std::to_string(time) + " (stage " +
                                std::to_string(stage) + ")",
                            time, stage);
    }
  }
  for (auto& c : out.c) c.resize(n);

  const double field_weight = mode == SolverMode::LinearDifference ? 2.0 : 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const bool nyq = g.is_nyquist(k);
    const Vec3& xi = g.wavevector(k);
    Complex e[3] = {};
    if (k > 0 && !nyq) {
      const Complex phi = -(s.sigma_e()[k] - s.sigma_i()[k]) / g.wavenumber_squared(k);
      for (std::size_t j = 0; j < 3; ++j) e[j] = kI * xi[j] * phi;
    }
    const double charge[2] = {field_weight, -1.0};
    const std::size_t sig[2] = {SpectralState::kSigmaE, SpectralState::kSigmaI};
    const int species = mode == SolverMode::LinearDifference ? 1 : 2;
    for (int a = 0; a < species; ++a) {
      const std::size_t b = sig[a];
      const Complex sigma = s.c[b][k];
      Complex div{};
      for (std::size_t j = 0; j < 3; ++j) div += xi[j] * s.c[b + 1 + j][k];
      out.c[b][k] = nyq ? Complex{} : -kI * div;
      for (std::size_t j = 0; j < 3; ++j)
        out.c[b + 1 + j][k] = (nyq ? Complex{} : -kI * xi[j] * sigma) - s.c[b + 1 + j][k] + charge[a] * e[j];
    }
    if (mode == SolverMode::LinearDifference) {
      out.c[SpectralState::kSigmaI][k] = 0.0;
      for (std::size_t j = 0; j < 3; ++j) out.c[SpectralState::kUi + j][k] = 0.0;
    }
    if (mode == SolverMode::Nonlinear) {
      out.c[SpectralState::kSigmaE][k] += nonlinear_.f1e[k];
      out.c[SpectralState::kSigmaI][k] += nonlinear_.f1i[k];
      for (std::size_t j = 0; j < 3; ++j) {
        out.c[SpectralState::kUe + j][k] += nonlinear_.f2e[j][k];
        out.c[SpectralState::kUi + j][k] += nonlinear_.f2i[j][k];
      }
    }
  }
  check_finite(out, time, stage);
}

void Stepper::step(SpectralState& state, double t, double dt) {
  rhs(state, k_[0], t, 1);
  axpy(stage_state_, k_[0], 0.5 * dt, state);
  rhs(stage_state_, k_[1], t + 0.5 * dt, 2);
  axpy(stage_state_, k_[1], 0.5 * dt, state);
  rhs(stage_state_, k_[2], t + 0.5 * dt, 3);
  axpy(stage_state_, k_[2], dt, state);
  rhs(stage_state_, k_[3], t + dt, 4);
  const double w = dt / 6.0;
  for (std::size_t c = 0; c < SpectralState::kComponents; ++c) {
    auto& y = state.c[c];
    for (std::size_t k = 0; k < y.size(); ++k)
      y[k] += w * (k_[0].c[c][k] + 2.0 * k_[1].c[c][k] + 2.0 * k_[2].c[c][k] + k_[3].c[c][k]);
  }
}

PerturbationState step(const PerturbationState& state, const SolverConfig& config) {
  SpectralTransform fft(config.grid);
  SpectralState s = to_spectral(fft, state);
  Stepper stepper(config);
  stepper.step(s, 0.0, config.dt);
  return to_physical(fft, s);
}

Trajectory run(const SolverConfig& config) {
  if (config.mode == SolverMode::LinearDifference) return run_difference_linear(config);
  SpectralTransform fft(config.grid);
  SpectralState initial = to_spectral(fft, make_initial_data(config.grid, config.initial));
  if (config.mode == SolverMode::Nonlinear && config.dealias)
    for (auto& f : initial.c) apply_dealias(config.grid, f);
  return integrate(config, std::move(initial));
}

Trajectory run(const SolverConfig& config, const SpectralState& initial) {
  if (config.mode == SolverMode::LinearDifference) return run_difference_linear(config, initial);
  return integrate(config, initial);
}

Trajectory run_difference_linear(const SolverConfig& config) {
  if (config.mode != SolverMode::LinearDifference)
    throw PreconditionError("run_difference_linear requires mode linear_difference");
  SpectralTransform fft(config.grid);
  return run_difference_linear(config, to_spectral(fft, make_initial_data(config.grid, config.initial)));
}

Trajectory run_difference_linear(const SolverConfig& config, const SpectralState& initial) {
  if (config.mode != SolverMode::LinearDifference)
    throw PreconditionError("run_difference_linear requires mode linear_difference");
  SpectralState d = to_difference_form(initial);
  double scale = 0.0;
  for (const Complex& c : d.sigma_e()) scale = std::max(scale, std::abs(c));
  if (std::abs(d.sigma_e()[0]) > 1e-12 * scale)
    throw PreconditionError("difference data: sigma_e - sigma_i has nonzero mean, so no field satisfies div E = "
                            "sigma_e - sigma_i on the periodic box");
  d.sigma_e()[0] = 0.0;
  return integrate(config, std::move(d));
}

std::array<Complex, 11> mode_vector(const Grid& grid, const SpectralState& state, std::size_t k) {
  std::array<Complex, 11> w{};
  for (std::size_t c = 0; c < 8; ++c) w[c] = state.c[c][k];
  if (k > 0 && !grid.is_nyquist(k)) {
    const Complex phi = -(state.sigma_e()[k] - state.sigma_i()[k]) / grid.wavenumber_squared(k);
    const Vec3& xi = grid.wavevector(k);
    for (std::size_t j = 0; j < 3; ++j) w[8 + j] = kI * xi[j] * phi;
  }
  return w;
}

PerturbationState Trajectory::physical_state(std::size_t i) const {
  SpectralTransform fft(config.grid);
  return to_physical(fft, states.at(i));
}

FieldE Trajectory::physical_field(std::size_t i) const {
  SpectralTransform fft(config.grid);
  FieldE out;
  for (std::size_t j = 0; j < 3; ++j) out.e[j] = fft.inverse(fields.at(i)[j]);
  SpectralField phi(config.grid.spectral_size(), Complex{});
  const SpectralState& s = states.at(i);
  for (std::size_t k = 1; k < phi.size(); ++k)
    phi[k] = -(s.sigma_e()[k] - s.sigma_i()[k]) / config.grid.wavenumber_squared(k);
  out.phi = fft.inverse(phi);
  return out;
}

double Trajectory::max_mass_drift() const {
  double drift = 0.0;
  if (diagnostics.empty()) return drift;
  const SnapshotDiagnostics& d0 = diagnostics.front();
  for (const SnapshotDiagnostics& d : diagnostics) {
    const double pairs[2][2] = {{d.mass_e, d0.mass_e}, {d.mass_i, d0.mass_i}};
    for (const auto& p : pairs) {
      const double delta = std::abs(p[0] - p[1]);
      drift = std::max(drift, p[1] != 0.0 ? delta / std::abs(p[1]) : delta);
    }
  }
  return drift;
}

double Trajectory::max_constraint_residual() const {
  double r = 0.0;
  for (const SnapshotDiagnostics& d : diagnostics) r = std::max(r, d.constraint_residual);
  return r;
}

}  // namespace epdecay
