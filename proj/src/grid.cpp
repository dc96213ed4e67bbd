#include "epdecay/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "epdecay/errors.hpp"

namespace epdecay {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int signed_mode(int index, int n) { return index <= n / 2 - 1 ? index : index - n; }

}  // namespace

Grid::Grid(int dim, int points, double length) : dim_(dim), points_(points), length_(length) {
  if (dim < 1 || dim > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  if (points < 2 || points % 2 != 0) throw ConfigError("grid points per axis must be even and >= 2");
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("box length must be positive");

  const auto n = static_cast<std::size_t>(points);
  const std::size_t half = n / 2 + 1;
  real_size_ = 1;
  for (int d = 0; d < dim; ++d) real_size_ *= n;
  spectral_size_ = real_size_ / n * half;

  wavevector_.resize(spectral_size_);
  k2_.resize(spectral_size_);
  weight_.resize(spectral_size_);
  mode_.resize(spectral_size_);
  dealias_.resize(spectral_size_);
  nyquist_.resize(spectral_size_);

  const double k0 = fundamental();
  const std::size_t n_outer = spectral_size_ / half;
  for (std::size_t outer = 0; outer < n_outer; ++outer) {
    std::array<int, 3> m{0, 0, 0};
    std::size_t rest = outer;
    for (int d = dim - 2; d >= 0; --d) {
      m[static_cast<std::size_t>(d)] = signed_mode(static_cast<int>(rest % n), points);
      rest /= n;
    }
    for (std::size_t j = 0; j < half; ++j) {
      const std::size_t k = outer * half + j;
      std::array<int, 3> mk = m;
      mk[static_cast<std::size_t>(dim - 1)] = static_cast<int>(j);
      // The last-axis entry j = N/2 is the unpaired Nyquist plane.
      bool nyq = static_cast<int>(j) == points / 2;
      bool keep = true;
      Vec3 kv{0.0, 0.0, 0.0};
      for (int d = 0; d < dim; ++d) {
        const int md = mk[static_cast<std::size_t>(d)];
        if (md == -points / 2) nyq = true;
        if (3 * std::abs(md) >= points) keep = false;
        kv[static_cast<std::size_t>(d)] = k0 * md;
      }
      mode_[k] = mk;
      wavevector_[k] = kv;
      k2_[k] = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
      weight_[k] = (j == 0 || static_cast<int>(j) == points / 2) ? 1.0 : 2.0;
      dealias_[k] = keep ? 1 : 0;
      nyquist_[k] = nyq ? 1 : 0;
      k_max_ = std::max(k_max_, std::sqrt(k2_[k]));
      if (keep) k_max_dealiased_ = std::max(k_max_dealiased_, std::sqrt(k2_[k]));
    }
  }
}

double Grid::fundamental() const noexcept { return 2.0 * std::numbers::pi / length_; }

double Grid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

double Grid::box_volume() const noexcept { return std::pow(length_, dim_); }

double Grid::crossover_time() const noexcept {
  const double r = length_ / (2.0 * std::numbers::pi);
  return r * r;
}

double Grid::wavenumber(std::size_t k) const { return std::sqrt(k2_[k]); }

std::size_t Grid::spectral_index(const std::array<int, 3>& m) const {
  const auto n = static_cast<std::size_t>(points_);
  const std::size_t half = n / 2 + 1;
  const int last = m[static_cast<std::size_t>(dim_ - 1)];
  if (last < 0 || last > points_ / 2) throw DomainError("last-axis mode must lie in [0, N/2]");
  std::size_t outer = 0;
  for (int d = 0; d < dim_ - 1; ++d) {
    const int md = m[static_cast<std::size_t>(d)];
    if (md < -points_ / 2 || md >= points_ / 2) throw DomainError("mode index outside the grid");
    outer = outer * n + static_cast<std::size_t>(md < 0 ? md + points_ : md);
  }
  return outer * half + static_cast<std::size_t>(last);
}

Vec3 Grid::position(std::size_t i) const {
  const auto n = static_cast<std::size_t>(points_);
  Vec3 x{0.0, 0.0, 0.0};
  for (int d = dim_ - 1; d >= 0; --d) {
    x[static_cast<std::size_t>(d)] = spacing() * static_cast<double>(i % n);
    i /= n;
  }
  return x;
}

struct SpectralTransform::Impl {
  Grid grid;
  double* real_buf = nullptr;
  fftw_complex* spec_buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit Impl(const Grid& g) : grid(g) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real_buf = fftw_alloc_real(grid.real_size());
    spec_buf = fftw_alloc_complex(grid.spectral_size());
    std::array<int, 3> dims{grid.points(), grid.points(), grid.points()};
    fwd = fftw_plan_dft_r2c(grid.dim(), dims.data(), real_buf, spec_buf, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r(grid.dim(), dims.data(), spec_buf, real_buf, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real_buf);
    fftw_free(spec_buf);
  }
};

SpectralTransform::SpectralTransform(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {}
SpectralTransform::~SpectralTransform() = default;
SpectralTransform::SpectralTransform(SpectralTransform&&) noexcept = default;
SpectralTransform& SpectralTransform::operator=(SpectralTransform&&) noexcept = default;

const Grid& SpectralTransform::grid() const noexcept { return impl_->grid; }

void SpectralTransform::forward(std::span<const double> in, std::span<Complex> out) {
  const Grid& g = impl_->grid;
  if (in.size() != g.real_size() || out.size() != g.spectral_size())
    throw ConfigError("forward transform: field size does not match grid");
  std::memcpy(impl_->real_buf, in.data(), in.size() * sizeof(double));
  fftw_execute(impl_->fwd);
  const double scale = 1.0 / static_cast<double>(g.real_size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = Complex(impl_->spec_buf[k][0] * scale, impl_->spec_buf[k][1] * scale);
}

void SpectralTransform::inverse(std::span<const Complex> in, std::span<double> out) {
  const Grid& g = impl_->grid;
  if (in.size() != g.spectral_size() || out.size() != g.real_size())
    throw ConfigError("inverse transform: field size does not match grid");
  for (std::size_t k = 0; k < in.size(); ++k) {
    impl_->spec_buf[k][0] = in[k].real();
    impl_->spec_buf[k][1] = in[k].imag();
  }
  fftw_execute(impl_->inv);
  std::memcpy(out.data(), impl_->real_buf, out.size() * sizeof(double));
}

SpectralField SpectralTransform::forward(std::span<const double> in) {
  SpectralField out(impl_->grid.spectral_size());
  forward(in, out);
  return out;
}

RealField SpectralTransform::inverse(std::span<const Complex> in) {
  RealField out(impl_->grid.real_size());
  inverse(in, out);
  return out;
}

double spectral_energy(const Grid& grid, std::span<const Complex> f, bool skip_mean) {
  double sum = 0.0;
  for (std::size_t k = skip_mean ? 1 : 0; k < f.size(); ++k) sum += grid.parseval_weight(k) * std::norm(f[k]);
  return sum;
}

double l2_norm(const Grid& grid, std::span<const Complex> f, bool skip_mean) {
  return std::sqrt(grid.box_volume() * spectral_energy(grid, f, skip_mean));
}

double max_abs(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double box_integral(const Grid& grid, std::span<const Complex> f) { return grid.box_volume() * f[0].real(); }

void apply_dealias(const Grid& grid, std::span<Complex> f) {
  for (std::size_t k = 0; k < f.size(); ++k)
    if (!grid.in_dealiased_band(k)) f[k] = 0.0;
}

void apply_nyquist_filter(const Grid& grid, std::span<Complex> f) {
  for (std::size_t k = 0; k < f.size(); ++k)
    if (grid.is_nyquist(k)) f[k] = 0.0;
}

}  // namespace epdecay
