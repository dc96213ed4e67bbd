#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace epdecay {

using Complex = std::complex<double>;
using RealField = std::vector<double>;
using SpectralField = std::vector<Complex>;
using Vec3 = std::array<double, 3>;

/// Uniform periodic grid on [0, L)^n, n in {1, 2, 3}, N points per axis.
///
/// Spectral arrays use the real-to-complex half layout: row-major over the
/// first n-1 axes (full range of modes) and the last axis restricted to
/// m in [0, N/2]. Coefficients are Fourier-series coefficients,
///   f(x) = sum_k c_k e^{i k.x},   k = (2 pi / L) m,
/// so the forward transform carries the 1/N^n normalization. Fields that
/// do not depend on the missing axes of a reduced-dimension grid are still
/// carried as 3-vectors; derivatives along those axes vanish.
class Grid {
 public:
  Grid(int dim, int points, double length);

  int dim() const noexcept { return dim_; }
  int points() const noexcept { return points_; }
  double length() const noexcept { return length_; }

  std::size_t real_size() const noexcept { return real_size_; }
  std::size_t spectral_size() const noexcept { return spectral_size_; }

  /// Lowest nonzero wavenumber 2 pi / L.
  double fundamental() const noexcept;
  double spacing() const noexcept { return length_ / points_; }
  double cell_volume() const noexcept;
  double box_volume() const noexcept;
  /// (L / 2 pi)^2: past this time the box cutoff replaces algebraic decay
  /// with exponential decay.
  double crossover_time() const noexcept;

  const Vec3& wavevector(std::size_t k) const { return wavevector_[k]; }
  double wavenumber_squared(std::size_t k) const { return k2_[k]; }
  double wavenumber(std::size_t k) const;
  const std::array<int, 3>& mode(std::size_t k) const { return mode_[k]; }
  /// Multiplicity of a half-spectrum entry in the full spectrum (1 or 2).
  double parseval_weight(std::size_t k) const { return weight_[k]; }
  /// Kept by the 2/3 rule: 3|m| < N on every axis.
  bool in_dealiased_band(std::size_t k) const { return dealias_[k] != 0; }
  /// Some axis carries the unpaired mode m = -N/2.
  bool is_nyquist(std::size_t k) const { return nyquist_[k] != 0; }

  /// Largest |k| over the grid (Nyquist included).
  double max_wavenumber() const noexcept { return k_max_; }
  /// Largest |k| kept by the 2/3 rule.
  double dealiased_max_wavenumber() const noexcept { return k_max_dealiased_; }

  /// Spectral index of integer mode m (the last component must be >= 0).
  std::size_t spectral_index(const std::array<int, 3>& m) const;
  Vec3 position(std::size_t i) const;

  bool operator==(const Grid& other) const noexcept {
    return dim_ == other.dim_ && points_ == other.points_ && length_ == other.length_;
  }

 private:
  int dim_;
  int points_;
  double length_;
  std::size_t real_size_ = 0;
  std::size_t spectral_size_ = 0;
  double k_max_ = 0.0;
  double k_max_dealiased_ = 0.0;
  std::vector<Vec3> wavevector_;
  std::vector<double> k2_;
  std::vector<double> weight_;
  std::vector<std::array<int, 3>> mode_;
  std::vector<unsigned char> dealias_;
  std::vector<unsigned char> nyquist_;
};

/// FFTW-backed real <-> half-spectrum transform for one grid. Each instance
/// owns its buffers and plans; share nothing mutable across threads.
class SpectralTransform {
 public:
  explicit SpectralTransform(const Grid& grid);
  ~SpectralTransform();
  SpectralTransform(SpectralTransform&&) noexcept;
  SpectralTransform& operator=(SpectralTransform&&) noexcept;
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  const Grid& grid() const noexcept;

  void forward(std::span<const double> in, std::span<Complex> out);
  void inverse(std::span<const Complex> in, std::span<double> out);
  SpectralField forward(std::span<const double> in);
  RealField inverse(std::span<const Complex> in);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// L^2(box) norm from Fourier-series coefficients.
double l2_norm(const Grid& grid, std::span<const Complex> f, bool skip_mean = false);
/// Sum over the full spectrum of weight * |c_k|^2 (no box-volume factor).
double spectral_energy(const Grid& grid, std::span<const Complex> f, bool skip_mean = false);
double max_abs(std::span<const double> f);
/// Box integral from Fourier coefficients: L^n c_0.
double box_integral(const Grid& grid, std::span<const Complex> f);

/// Zero every coefficient outside the 2/3 band.
void apply_dealias(const Grid& grid, std::span<Complex> f);
/// Zero the unpaired Nyquist coefficients.
void apply_nyquist_filter(const Grid& grid, std::span<Complex> f);

}  // namespace epdecay
