#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "epdecay/grid.hpp"

namespace epdecay {

/// Radial profile of the Littlewood-Paley bump phi_0. It is a product of two
/// exponential smoothsteps: zero outside [3/4, 8/3], positive inside, and
/// identically 1 on [1, 2].
double bump_profile(double r);

/// Normalized dyadic multiplier
///   F Phi_q(r) = phi_0(2^{-q} r) / sum_{j in Z} phi_0(2^{-j} r),
/// supported in A_q = 2^q [3/4, 8/3]; zero at r = 0.
double dyadic_multiplier(int q, double r);

/// F Psi(r) = 1 - sum_{q >= 0} F Phi_q(r); equals 1 for r <= 3/4.
double low_frequency_multiplier(double r);

/// Inclusive range of q with F Phi_q(r) > 0 (r > 0).
std::pair<int, int> active_blocks(double r);

enum class SumIndex { One, Infinity };

/// L^2-based Besov norm selector: B^s_{2,r} (inhomogeneous) or its
/// homogeneous counterpart.
struct BesovSpec {
  double s = 0.0;
  SumIndex r = SumIndex::One;
  bool homogeneous = true;
};

/// Dyadic multipliers sampled on a grid's half spectrum.
///
/// Each nonzero wavevector meets at most two annuli, so the partition stores
/// per mode the lowest active block index and the weights of that block and
/// the next. The homogeneous range [q_min, q_max] must contain every active
/// block of every nonzero mode.
class DyadicPartition {
 public:
  DyadicPartition(const Grid& grid, int q_min, int q_max);
  /// Smallest range covering the grid: q_min is set by the fundamental
  /// mode 2 pi / L, q_max by the largest wavenumber.
  static DyadicPartition covering(const Grid& grid);
  static std::pair<int, int> covering_range(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  int q_min() const noexcept { return q_min_; }
  int q_max() const noexcept { return q_max_; }

  /// F Phi_q sampled at every spectral index (zero for q outside the range).
  std::vector<double> block_weights(int q) const;
  /// F Psi sampled at every spectral index.
  std::span<const double> low_weights() const noexcept { return low_; }

  /// Lowest active block of spectral index k, and the two block weights.
  int first_block(std::size_t k) const { return first_[k]; }
  const std::array<double, 2>& weights(std::size_t k) const { return weights_[k]; }

 private:
  Grid grid_;
  int q_min_;
  int q_max_;
  std::vector<int> first_;
  std::vector<std::array<double, 2>> weights_;
  std::vector<double> low_;
};

/// Homogeneous: Phi_q * f. Inhomogeneous: Psi * f for q = -1, Phi_q * f for
/// q >= 0 and 0 for q <= -2.
SpectralField dyadic_block(const DyadicPartition& partition, std::span<const Complex> f, int q, bool homogeneous);
RealField dyadic_block(const DyadicPartition& partition, SpectralTransform& fft, std::span<const double> f, int q,
                       bool homogeneous);

/// Block norms ||Delta_q Lambda^ell f||_{L^2} of a group of components
/// (combined in l^2 over components). Homogeneous blocks run over
/// [q_min, q_max]; inhomogeneous over [-1, q_max]. The first element of
/// the result corresponds to the first block index of the range.
struct BlockNorms {
  int first_q = 0;
  std::vector<double> values;
};
BlockNorms block_norms(const DyadicPartition& partition, std::span<const std::span<const Complex>> group,
                       bool homogeneous, double ell = 0.0);

double besov_norm(const DyadicPartition& partition, std::span<const Complex> f, const BesovSpec& spec);
/// Besov norm of Lambda^ell applied to a component group.
double besov_norm(const DyadicPartition& partition, std::span<const std::span<const Complex>> group,
                  const BesovSpec& spec, double ell = 0.0);
double besov_norm(const DyadicPartition& partition, SpectralTransform& fft, std::span<const double> f,
                  const BesovSpec& spec);
/// Weighted l^r combination of precomputed block norms.
double combine_blocks(const BlockNorms& blocks, const BesovSpec& spec);

/// Lambda^alpha f = F^{-1} |xi|^alpha F f. The mean mode maps to 0 for
/// alpha != 0; alpha < 0 requires a zero mean (DomainError otherwise).
SpectralField fractional_derivative(const Grid& grid, std::span<const Complex> f, double alpha);
RealField fractional_derivative(SpectralTransform& fft, std::span<const double> f, double alpha);

/// ||Lambda^alpha f||_{L^2} without materializing the derivative.
double derivative_l2_norm(const Grid& grid, std::span<const std::span<const Complex>> group, double alpha);

/// Discrete L^1 norm (cell volume times sum of |f|).
double l1_norm(const Grid& grid, std::span<const double> f);

}  // namespace epdecay
