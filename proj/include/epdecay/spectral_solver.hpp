#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "epdecay/grid.hpp"
#include "epdecay/model.hpp"
#include "epdecay/radial_quadrature.hpp"

namespace epdecay {

enum class SolverMode { Nonlinear, LinearFull, LinearDifference };
std::string to_string(SolverMode mode);
SolverMode parse_solver_mode(const std::string& text);

enum class InitialKind { GaussianMass, WellPrepared, RandomBand };
std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& text);

struct InitialData {
  InitialKind kind = InitialKind::GaussianMass;
  /// Peak density perturbation.
  double amplitude = 1e-2;
  /// Total mass of each density bump (gaussian-mass only).
  double mass = 1.0;
  std::uint64_t seed = 1;
};

/// Builds irrotational initial data (velocities are gradients):
///  - gaussian-mass: Gaussian bumps of mass m in sigma_e (peak = amplitude)
///    and sigma_i (1.25x wider, same mass), so the data lie in L^1;
///  - well-prepared: zero-mean bumps;
///  - random-band: random coefficients on modes with 3|m| < N/2 per axis.
/// Throws AmplitudeError if 1 + sigma_a <= 0 anywhere.
PerturbationState make_initial_data(const Grid& grid, const InitialData& data);

/// Spectral state with a single mode m (and its conjugate partner) set to
/// the given reduced coefficients (sigma_e, u_e, sigma_i, u_i).
SpectralState single_mode_state(const Grid& grid, const std::array<int, 3>& mode,
                                const std::array<Complex, 8>& coefficients);

struct SolverConfig {
  Grid grid{3, 16, 32.0};
  PressureLaw law{};
  SolverMode mode = SolverMode::Nonlinear;
  double dt = 0.05;
  double final_time = 1.0;
  double snapshot_interval = 0.5;
  InitialData initial{};
  bool dealias = true;

  /// 0.5 / (k_max (1 + max|u|) + 1).
  double cfl_limit(double max_velocity) const;
  /// Checks the time grid; throws ConfigError.
  void validate() const;
  /// Steps per snapshot and the effective dt (<= dt) that lands on every
  /// snapshot time exactly.
  int steps_per_snapshot() const;
  double effective_dt() const;
  int snapshot_count() const;
};

struct SnapshotDiagnostics {
  double time = 0.0;
  double mass_e = 0.0;
  double mass_i = 0.0;
  /// Mean-free L^2 norms, indexed by NormGroup.
  std::array<double, 4> group_norms{};
  /// ||div E - (sigma_e - sigma_i)||_{L^2} (mean mode excluded).
  double constraint_residual = 0.0;
  /// ||curl E|| / ||E||.
  double curl_residual = 0.0;
  /// 1/2 (|sigma_e|^2 + |u_e|^2 + |sigma_i|^2 + |u_i|^2 + |E|^2) in L^2.
  double energy = 0.0;
  /// 1/2 (|sigma_e - sigma_i|^2 + |u_e - u_i|^2 + 2 |E|^2) in L^2.
  double difference_energy = 0.0;
  double min_density = 1.0;
};

struct Trajectory {
  SolverConfig config;
  std::vector<double> times;
  /// Spectral snapshots of (sigma_e, u_e, sigma_i, u_i). In linear_difference
  /// mode the e-slots carry (sigma_e - sigma_i, u_e - u_i) and the i-slots are zero.
  std::vector<SpectralState> states;
  std::vector<SpectralVectorField> fields;
  std::vector<SnapshotDiagnostics> diagnostics;

  const Grid& grid() const noexcept { return config.grid; }
  std::size_t size() const noexcept { return times.size(); }
  PerturbationState physical_state(std::size_t i) const;
  FieldE physical_field(std::size_t i) const;
  double max_mass_drift() const;
  double max_constraint_residual() const;
};

/// E = grad Phi, Laplacian(Phi) = sigma_e - sigma_i, written into `e`.
void constraint_field(const Grid& grid, const SpectralState& state, SpectralVectorField& e);

SnapshotDiagnostics diagnose(const Grid& grid, const SpectralState& state, const SpectralVectorField& e,
                             double time);

/// Explicit RK4 integrator for one configuration. Owns its workspaces.
class Stepper {
 public:
  explicit Stepper(const SolverConfig& config);

  const SolverConfig& config() const noexcept { return config_; }
  /// d/dt state; E is re-solved from the constraint. Throws DivergenceError
  /// tagged with `stage` on positivity loss or non-finite values.
  void rhs(const SpectralState& state, SpectralState& out, double time, int stage);
  /// One RK4 step of size dt from time t.
  void step(SpectralState& state, double t, double dt);

 private:
  SolverConfig config_;
  NonlinearEvaluator evaluator_;
  SpectralNonlinearity nonlinear_;
  SpectralVectorField field_;
  SpectralState k_[4];
  SpectralState stage_state_;
};

/// One RK4 step of size config.dt (convenience wrapper).
PerturbationState step(const PerturbationState& state, const SolverConfig& config);

/// Integrates from the configured initial data (or the given state).
/// Throws DivergenceError carrying the blow-up time.
Trajectory run(const SolverConfig& config);
Trajectory run(const SolverConfig& config, const SpectralState& initial);

/// linear_difference mode from a two-species state: integrates
/// (sigma_e - sigma_i, u_e - u_i). Throws PreconditionError if
/// sigma_e - sigma_i has nonzero mean (no field solves the constraint) or the
/// configuration mode is not linear_difference.
Trajectory run_difference_linear(const SolverConfig& config);
Trajectory run_difference_linear(const SolverConfig& config, const SpectralState& initial);

/// Fourier-mode view of a spectral state at half-spectrum index k as the
/// 11-vector (sigma_e, u_e, sigma_i, u_i, E) with E from the constraint.
std::array<Complex, 11> mode_vector(const Grid& grid, const SpectralState& state, std::size_t k);

}  // namespace epdecay
