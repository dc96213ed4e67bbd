#pragma once

#include <array>
#include <span>

#include "epdecay/grid.hpp"

namespace epdecay {

/// gamma-law pressure p(n) = n^gamma / gamma, normalized so p'(1) = 1.
class PressureLaw {
 public:
  explicit PressureLaw(double gamma = 5.0 / 3.0);

  double gamma() const noexcept { return gamma_; }
  double pressure(double density) const;
  double pressure_derivative(double density) const;

 private:
  double gamma_;
};

/// h(sigma) = p'(1 + sigma) / (1 + sigma) - 1 = (1 + sigma)^{gamma - 2} - 1.
/// Throws DomainError when 1 + sigma <= 0.
double enthalpy_coefficient(const PressureLaw& law, double sigma);

using VectorField = std::array<RealField, 3>;
using SpectralVectorField = std::array<SpectralField, 3>;

/// Real-space perturbation (sigma_e, u_e, sigma_i, u_i) around n = 1, u = 0.
struct PerturbationState {
  RealField sigma_e;
  VectorField u_e;
  RealField sigma_i;
  VectorField u_i;

  static PerturbationState zeros(const Grid& grid);
};

/// Spectral components in the order (sigma_e, u_e[3], sigma_i, u_i[3]).
struct SpectralState {
  static constexpr std::size_t kSigmaE = 0;
  static constexpr std::size_t kUe = 1;
  static constexpr std::size_t kSigmaI = 4;
  static constexpr std::size_t kUi = 5;
  static constexpr std::size_t kComponents = 8;

  std::array<SpectralField, kComponents> c;

  static SpectralState zeros(const Grid& grid);

  SpectralField& sigma_e() { return c[kSigmaE]; }
  SpectralField& sigma_i() { return c[kSigmaI]; }
  SpectralField& u_e(std::size_t j) { return c[kUe + j]; }
  SpectralField& u_i(std::size_t j) { return c[kUi + j]; }
  const SpectralField& sigma_e() const { return c[kSigmaE]; }
  const SpectralField& sigma_i() const { return c[kSigmaI]; }
  const SpectralField& u_e(std::size_t j) const { return c[kUe + j]; }
  const SpectralField& u_i(std::size_t j) const { return c[kUi + j]; }
};

SpectralState to_spectral(SpectralTransform& fft, const PerturbationState& state);
PerturbationState to_physical(SpectralTransform& fft, const SpectralState& state);

/// Electrostatic field E = grad Phi with Laplacian(Phi) = sigma_e - sigma_i.
struct FieldE {
  VectorField e;
  RealField phi;
  /// Spatial mean of sigma_e - sigma_i removed before solving (zero-mean gauge).
  double projected_mean = 0.0;
  /// Set when |projected_mean| exceeds round-off relative to the source.
  bool mean_warning = false;
};

struct SpectralFieldE {
  SpectralVectorField e;
  SpectralField phi;
  double projected_mean = 0.0;
  bool mean_warning = false;
};

/// Spectral Poisson solve for a given charge density D = sigma_e - sigma_i.
/// Nyquist modes of E are zeroed (i xi is not Hermitian there).
SpectralFieldE solve_field(const Grid& grid, std::span<const Complex> charge);
FieldE poisson_field(SpectralTransform& fft, std::span<const double> sigma_e, std::span<const double> sigma_i);

/// f1a = -div(sigma_a u_a), f2a = -u_a.grad u_a - h(sigma_a) grad sigma_a,
/// f3 = -grad Laplacian^{-1} div(sigma_e u_e - sigma_i u_i).
struct Nonlinearity {
  RealField f1e;
  VectorField f2e;
  RealField f1i;
  VectorField f2i;
  VectorField f3;
};

struct SpectralNonlinearity {
  SpectralField f1e;
  SpectralVectorField f2e;
  SpectralField f1i;
  SpectralVectorField f2i;
  SpectralVectorField f3;

  static SpectralNonlinearity zeros(const Grid& grid);
};

/// Pseudospectral evaluation of the quadratic and enthalpy terms. Products
/// are formed in physical space; with dealiasing on, every product spectrum
/// is truncated to the 2/3 band.
class NonlinearEvaluator {
 public:
  NonlinearEvaluator(const Grid& grid, PressureLaw law, bool dealias = true);

  const Grid& grid() const noexcept { return fft_.grid(); }
  const PressureLaw& law() const noexcept { return law_; }

  /// Throws DomainError if 1 + sigma_a <= 0 or a value is not finite.
  void evaluate(const SpectralState& state, SpectralNonlinearity& out);
  /// min over both species of 1 + sigma_a seen by the last evaluate().
  double min_density() const noexcept { return min_density_; }

 private:
  SpectralTransform fft_;
  PressureLaw law_;
  bool dealias_;
  double min_density_ = 1.0;
  RealField sigma_, scratch_, enthalpy_;
  VectorField u_, grad_sigma_, product_;
  std::array<VectorField, 3> grad_u_;
  SpectralField spec_tmp_;
};

Nonlinearity nonlinear_terms(const Grid& grid, const PerturbationState& state, const PressureLaw& law);

// Spectral differential operators. The Nyquist modes of derivatives are set
// to zero.
SpectralField spectral_divergence(const Grid& grid, const SpectralVectorField& v);
SpectralVectorField spectral_gradient(const Grid& grid, std::span<const Complex> f);
SpectralVectorField spectral_curl(const Grid& grid, const SpectralVectorField& v);
double vector_l2_norm(const Grid& grid, const SpectralVectorField& v, bool skip_mean = false);

}  // namespace epdecay
