#include "epdecay/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epdecay/errors.hpp"

namespace epdecay {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_sizes(const Grid& grid, std::span<const double> f) {
  if (f.size() != grid.real_size()) throw ConfigError("field size does not match grid");
}

}  // namespace

PressureLaw::PressureLaw(double gamma) : gamma_(gamma) {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw ConfigError("pressure law requires gamma > 1");
}

double PressureLaw::pressure(double density) const {
  if (!(density > 0.0)) throw DomainError("pressure: density must be positive");
  return std::pow(density, gamma_) / gamma_;
}

double PressureLaw::pressure_derivative(double density) const {
  if (!(density > 0.0)) throw DomainError("pressure: density must be positive");
  return std::pow(density, gamma_ - 1.0);
}

double enthalpy_coefficient(const PressureLaw& law, double sigma) {
  const double n = 1.0 + sigma;
  if (!(n > 0.0)) throw DomainError("enthalpy_coefficient: non-physical density 1 + sigma <= 0");
  return std::pow(n, law.gamma() - 2.0) - 1.0;
}

PerturbationState PerturbationState::zeros(const Grid& grid) {
  PerturbationState s;
  const RealField z(grid.real_size(), 0.0);
  s.sigma_e = z;
  s.sigma_i = z;
  s.u_e = {z, z, z};
  s.u_i = {z, z, z};
  return s;
}

SpectralState SpectralState::zeros(const Grid& grid) {
  SpectralState s;
  for (auto& f : s.c) f.assign(grid.spectral_size(), Complex{});
  return s;
}

SpectralNonlinearity SpectralNonlinearity::zeros(const Grid& grid) {
  const SpectralField z(grid.spectral_size(), Complex{});
  return {z, {z, z, z}, z, {z, z, z}, {z, z, z}};
}

SpectralState to_spectral(SpectralTransform& fft, const PerturbationState& state) {
  SpectralState out;
  out.sigma_e() = fft.forward(state.sigma_e);
  out.sigma_i() = fft.forward(state.sigma_i);
  for (std::size_t j = 0; j < 3; ++j) {
    out.u_e(j) = fft.forward(state.u_e[j]);
    out.u_i(j) = fft.forward(state.u_i[j]);
  }
  return out;
}

PerturbationState to_physical(SpectralTransform& fft, const SpectralState& state) {
  PerturbationState out;
  out.sigma_e = fft.inverse(state.sigma_e());
  out.sigma_i = fft.inverse(state.sigma_i());
  for (std::size_t j = 0; j < 3; ++j) {
    out.u_e[j] = fft.inverse(state.u_e(j));
    out.u_i[j] = fft.inverse(state.u_i(j));
  }
  return out;
}

SpectralFieldE solve_field(const Grid& grid, std::span<const Complex> charge) {
  if (charge.size() != grid.spectral_size()) throw ConfigError("charge size does not match grid");
  SpectralFieldE out;
  const std::size_t n = grid.spectral_size();
  out.phi.assign(n, Complex{});
  for (auto& c : out.e) c.assign(n, Complex{});

  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(charge[k]));
  out.projected_mean = charge[0].real();
  out.mean_warning = std::abs(out.projected_mean) > 1e-12 * std::max(scale, 1e-300) && scale > 0.0;

  for (std::size_t k = 1; k < n; ++k) {
    const Complex phi = -charge[k] / grid.wavenumber_squared(k);
    out.phi[k] = phi;
    if (grid.is_nyquist(k)) continue;
    const Vec3& xi = grid.wavevector(k);
    for (std::size_t j = 0; j < 3; ++j) out.e[j][k] = kI * xi[j] * phi;
  }
  return out;
}

FieldE poisson_field(SpectralTransform& fft, std::span<const double> sigma_e, std::span<const double> sigma_i) {
  const Grid& grid = fft.grid();
  check_sizes(grid, sigma_e);
  check_sizes(grid, sigma_i);
  RealField charge(grid.real_size());
  for (std::size_t i = 0; i < charge.size(); ++i) charge[i] = sigma_e[i] - sigma_i[i];
  const SpectralFieldE s = solve_field(grid, fft.forward(charge));
  FieldE out;
  out.phi = fft.inverse(s.phi);
  for (std::size_t j = 0; j < 3; ++j) out.e[j] = fft.inverse(s.e[j]);
  out.projected_mean = s.projected_mean;
  out.mean_warning = s.mean_warning;
  return out;
}

SpectralField spectral_divergence(const Grid& grid, const SpectralVectorField& v) {
  SpectralField out(grid.spectral_size(), Complex{});
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (grid.is_nyquist(k)) continue;
    const Vec3& xi = grid.wavevector(k);
    out[k] = kI * (xi[0] * v[0][k] + xi[1] * v[1][k] + xi[2] * v[2][k]);
  }
  return out;
}

SpectralVectorField spectral_gradient(const Grid& grid, std::span<const Complex> f) {
  SpectralVectorField out;
  for (auto& c : out) c.assign(grid.spectral_size(), Complex{});
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (grid.is_nyquist(k)) continue;
    const Vec3& xi = grid.wavevector(k);
    for (std::size_t j = 0; j < 3; ++j) out[j][k] = kI * xi[j] * f[k];
  }
  return out;
}

SpectralVectorField spectral_curl(const Grid& grid, const SpectralVectorField& v) {
  SpectralVectorField out;
  for (auto& c : out) c.assign(grid.spectral_size(), Complex{});
  for (std::size_t k = 0; k < grid.spectral_size(); ++k) {
    if (grid.is_nyquist(k)) continue;
    const Vec3& xi = grid.wavevector(k);
    out[0][k] = kI * (xi[1] * v[2][k] - xi[2] * v[1][k]);
    out[1][k] = kI * (xi[2] * v[0][k] - xi[0] * v[2][k]);
    out[2][k] = kI * (xi[0] * v[1][k] - xi[1] * v[0][k]);
  }
  return out;
}

double vector_l2_norm(const Grid& grid, const SpectralVectorField& v, bool skip_mean) {
  double e = 0.0;
  for (const auto& c : v) e += spectral_energy(grid, c, skip_mean);
  return std::sqrt(grid.box_volume() * e);
}

NonlinearEvaluator::NonlinearEvaluator(const Grid& grid, PressureLaw law, bool dealias)
    : fft_(grid), law_(law), dealias_(dealias) {
  const RealField z(grid.real_size(), 0.0);
  sigma_ = z;
  scratch_ = z;
  enthalpy_ = z;
  u_ = {z, z, z};
  grad_sigma_ = {z, z, z};
  product_ = {z, z, z};
  for (auto& g : grad_u_) g = {z, z, z};
  spec_tmp_.assign(grid.spectral_size(), Complex{});
}

void NonlinearEvaluator::evaluate(const SpectralState& state, SpectralNonlinearity& out) {
  const Grid& g = fft_.grid();
  const std::size_t nr = g.real_size();
  const std::size_t ns = g.spectral_size();
  const auto dim = static_cast<std::size_t>(g.dim());
  for (auto* f : {&out.f1e, &out.f1i}) f->assign(ns, Complex{});
  for (auto* v : {&out.f2e, &out.f2i, &out.f3})
    for (auto& c : *v) c.assign(ns, Complex{});

  // sigma_a u_a products per species, kept for f3.
  std::array<SpectralVectorField, 2> flux;
  min_density_ = std::numeric_limits<double>::infinity();

  for (int species = 0; species < 2; ++species) {
    const SpectralField& sig_hat = species == 0 ? state.sigma_e() : state.sigma_i();
    const std::size_t u0 = species == 0 ? SpectralState::kUe : SpectralState::kUi;

    fft_.inverse(sig_hat, sigma_);
    for (std::size_t i = 0; i < nr; ++i) {
      const double n = 1.0 + sigma_[i];
      if (!std::isfinite(n)) throw DomainError("nonlinear_terms: non-finite density");
      min_density_ = std::min(min_density_, n);
    }
    if (!(min_density_ > 0.0)) throw DomainError("nonlinear_terms: density positivity violated");

    for (std::size_t c = 0; c < 3; ++c) fft_.inverse(state.c[u0 + c], u_[c]);

    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < ns; ++k)
        spec_tmp_[k] = g.is_nyquist(k) ? Complex{} : kI * g.wavevector(k)[j] * sig_hat[k];
      fft_.inverse(spec_tmp_, grad_sigma_[j]);
      for (std::size_t c = 0; c < 3; ++c) {
        const SpectralField& uc = state.c[u0 + c];
        for (std::size_t k = 0; k < ns; ++k)
          spec_tmp_[k] = g.is_nyquist(k) ? Complex{} : kI * g.wavevector(k)[j] * uc[k];
        fft_.inverse(spec_tmp_, grad_u_[c][j]);
      }
    }

    // f1a = -div(sigma_a u_a).
    SpectralField& f1 = species == 0 ? out.f1e : out.f1i;
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t i = 0; i < nr; ++i) product_[j][i] = sigma_[i] * u_[j][i];
      flux[static_cast<std::size_t>(species)][j] = fft_.forward(product_[j]);
      auto& fj = flux[static_cast<std::size_t>(species)][j];
      if (dealias_) apply_dealias(g, fj);
    }
    for (std::size_t k = 0; k < ns; ++k) {
      if (g.is_nyquist(k)) continue;
      const Vec3& xi = g.wavevector(k);
      const auto& fl = flux[static_cast<std::size_t>(species)];
      f1[k] = -kI * (xi[0] * fl[0][k] + xi[1] * fl[1][k] + xi[2] * fl[2][k]);
    }

    // f2a = -u_a . grad u_a - h(sigma_a) grad sigma_a.
    SpectralVectorField& f2 = species == 0 ? out.f2e : out.f2i;
    for (std::size_t i = 0; i < nr; ++i) enthalpy_[i] = enthalpy_coefficient(law_, sigma_[i]);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < nr; ++i) {
        double adv = 0.0;
        for (std::size_t j = 0; j < dim; ++j) adv += u_[j][i] * grad_u_[c][j][i];
        double v = -adv;
        if (c < dim) v -= enthalpy_[i] * grad_sigma_[c][i];
        scratch_[i] = v;
      }
      fft_.forward(scratch_, f2[c]);
      if (dealias_) apply_dealias(g, f2[c]);
    }
  }

  // f3 = -xi (xi . F) / |xi|^2 with F = sigma_e u_e - sigma_i u_i.
  for (std::size_t k = 1; k < ns; ++k) {
    if (g.is_nyquist(k)) continue;
    const Vec3& xi = g.wavevector(k);
    Complex dot{};
    for (std::size_t j = 0; j < 3; ++j) dot += xi[j] * (flux[0][j][k] - flux[1][j][k]);
    const double k2 = g.wavenumber_squared(k);
    for (std::size_t j = 0; j < 3; ++j) out.f3[j][k] = -xi[j] * dot / k2;
  }
}

Nonlinearity nonlinear_terms(const Grid& grid, const PerturbationState& state, const PressureLaw& law) {
  check_sizes(grid, state.sigma_e);
  check_sizes(grid, state.sigma_i);
  for (std::size_t j = 0; j < 3; ++j) {
    check_sizes(grid, state.u_e[j]);
    check_sizes(grid, state.u_i[j]);
  }
  NonlinearEvaluator eval(grid, law);
  SpectralTransform fft(grid);
  SpectralState s = to_spectral(fft, state);
  SpectralNonlinearity n;
  eval.evaluate(s, n);
  Nonlinearity out;
  out.f1e = fft.inverse(n.f1e);
  out.f1i = fft.inverse(n.f1i);
  for (std::size_t j = 0; j < 3; ++j) {
    out.f2e[j] = fft.inverse(n.f2e[j]);
    out.f2i[j] = fft.inverse(n.f2i[j]);
    out.f3[j] = fft.inverse(n.f3[j]);
  }
  return out;
}

}  // namespace epdecay
