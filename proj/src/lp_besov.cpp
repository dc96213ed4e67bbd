#include "epdecay/lp_besov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "epdecay/errors.hpp"

namespace epdecay {

namespace {

constexpr double kInner = 0.75;
constexpr double kOuter = 8.0 / 3.0;

double exp_ramp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

/// C^infinity step: 0 for x <= 0, 1 for x >= 1.
double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = exp_ramp(x);
  return a / (a + exp_ramp(1.0 - x));
}

double mean_tolerance(std::span<const Complex> f) {
  double scale = 0.0;
  for (const Complex& c : f) scale = std::max(scale, std::abs(c));
  return 1e-14 * scale;
}

}  // namespace

double bump_profile(double r) {
  if (!(r > kInner) || !(r < kOuter)) return 0.0;
  return smoothstep((r - kInner) / (1.0 - kInner)) * smoothstep((kOuter - r) / (kOuter - 2.0));
}

std::pair<int, int> active_blocks(double r) {
  if (!(r > 0.0)) throw DomainError("active_blocks: r must be positive");
  // phi_0(2^{-j} r) > 0  <=>  log2(3r/8) < j < log2(4r/3).
  int lo = static_cast<int>(std::floor(std::log2(r / kOuter)));
  int hi = static_cast<int>(std::ceil(std::log2(r / kInner)));
  while (lo <= hi && bump_profile(std::ldexp(r, -lo)) <= 0.0) ++lo;
  while (hi >= lo && bump_profile(std::ldexp(r, -hi)) <= 0.0) --hi;
  return {lo, hi};
}

double dyadic_multiplier(int q, double r) {
  if (!(r > 0.0)) return 0.0;
  const double num = bump_profile(std::ldexp(r, -q));
  if (num <= 0.0) return 0.0;
  const auto [lo, hi] = active_blocks(r);
  double den = 0.0;
  for (int j = lo; j <= hi; ++j) den += bump_profile(std::ldexp(r, -j));
  return num / den;
}

double low_frequency_multiplier(double r) {
  if (!(r > 0.0)) return 1.0;
  const auto [lo, hi] = active_blocks(r);
  double high = 0.0;
  for (int q = std::max(lo, 0); q <= hi; ++q) high += dyadic_multiplier(q, r);
  return hi < 0 ? 1.0 : 1.0 - high;
}

std::pair<int, int> DyadicPartition::covering_range(const Grid& grid) {
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (std::size_t k = 1; k < grid.spectral_size(); ++k) {
    const auto [a, b] = active_blocks(grid.wavenumber(k));
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  return {lo, hi};
}

DyadicPartition DyadicPartition::covering(const Grid& grid) {
  const auto [lo, hi] = covering_range(grid);
  return DyadicPartition(grid, lo, hi);
}

DyadicPartition::DyadicPartition(const Grid& grid, int q_min, int q_max) : grid_(grid), q_min_(q_min), q_max_(q_max) {
  if (q_min > q_max) throw ConfigError("dyadic partition: q_min > q_max");
  const auto [need_lo, need_hi] = covering_range(grid);
  if (q_min < need_lo)
    throw ConfigError("dyadic partition: grid too coarse to resolve annulus A_" + std::to_string(q_min) +
                      " (lowest resolved block is " + std::to_string(need_lo) + ")");
  if (q_min > need_lo || q_max < need_hi)
    throw ConfigError("dyadic partition: range [" + std::to_string(q_min) + ", " + std::to_string(q_max) +
                      "] does not cover the resolved band [" + std::to_string(need_lo) + ", " +
                      std::to_string(need_hi) + "]");

  const std::size_t n = grid.spectral_size();
  first_.assign(n, 0);
  weights_.assign(n, {0.0, 0.0});
  low_.assign(n, 0.0);
  low_[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double r = grid.wavenumber(k);
    const auto [lo, hi] = active_blocks(r);
    first_[k] = lo;
    weights_[k][0] = dyadic_multiplier(lo, r);
    weights_[k][1] = hi > lo ? dyadic_multiplier(lo + 1, r) : 0.0;
    low_[k] = low_frequency_multiplier(r);
  }
}

std::vector<double> DyadicPartition::block_weights(int q) const {
  std::vector<double> w(grid_.spectral_size(), 0.0);
  for (std::size_t k = 1; k < w.size(); ++k) {
    const int d = q - first_[k];
    if (d == 0 || d == 1) w[k] = weights_[k][static_cast<std::size_t>(d)];
  }
  return w;
}

SpectralField dyadic_block(const DyadicPartition& partition, std::span<const Complex> f, int q, bool homogeneous) {
  const Grid& grid = partition.grid();
  if (f.size() != grid.spectral_size()) throw ConfigError("dyadic_block: field size does not match grid");
  SpectralField out(f.size(), Complex{});
  if (!homogeneous && q <= -2) return out;
  if (!homogeneous && q == -1) {
    const auto low = partition.low_weights();
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = low[k] * f[k];
    return out;
  }
  const std::vector<double> w = partition.block_weights(q);
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = w[k] * f[k];
  return out;
}

RealField dyadic_block(const DyadicPartition& partition, SpectralTransform& fft, std::span<const double> f, int q,
                       bool homogeneous) {
  return fft.inverse(dyadic_block(partition, fft.forward(f), q, homogeneous));
}

BlockNorms block_norms(const DyadicPartition& partition, std::span<const std::span<const Complex>> group,
                       bool homogeneous, double ell) {
  const Grid& grid = partition.grid();
  BlockNorms out;
  out.first_q = homogeneous ? partition.q_min() : -1;
  const int last_q = std::max(partition.q_max(), out.first_q);
  out.values.assign(static_cast<std::size_t>(last_q - out.first_q + 1), 0.0);
  const auto low = partition.low_weights();

  for (const auto& f : group) {
    if (f.size() != grid.spectral_size()) throw ConfigError("block_norms: field size does not match grid");
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double a2 = std::norm(f[k]);
      if (a2 == 0.0) continue;
      double e = grid.parseval_weight(k) * a2;
      if (ell != 0.0) {
        if (k == 0) continue;
        e *= std::pow(grid.wavenumber_squared(k), ell);
      }
      if (!homogeneous) {
        out.values[0] += low[k] * low[k] * e;
        if (k == 0) continue;
      } else if (k == 0) {
        continue;
      }
      for (std::size_t j = 0; j < 2; ++j) {
        const int q = partition.first_block(k) + static_cast<int>(j);
        const double w = partition.weights(k)[j];
        if (w == 0.0 || (!homogeneous && q < 0)) continue;
        out.values[static_cast<std::size_t>(q - out.first_q)] += w * w * e;
      }
    }
  }
  for (double& v : out.values) v = std::sqrt(grid.box_volume() * v);
  return out;
}

double combine_blocks(const BlockNorms& blocks, const BesovSpec& spec) {
  double acc = 0.0;
  for (std::size_t i = 0; i < blocks.values.size(); ++i) {
    const int q = blocks.first_q + static_cast<int>(i);
    const double term = std::exp2(q * spec.s) * blocks.values[i];
    if (spec.r == SumIndex::One)
      acc += term;
    else
      acc = std::max(acc, term);
  }
  return acc;
}

double besov_norm(const DyadicPartition& partition, std::span<const std::span<const Complex>> group,
                  const BesovSpec& spec, double ell) {
  return combine_blocks(block_norms(partition, group, spec.homogeneous, ell), spec);
}

double besov_norm(const DyadicPartition& partition, std::span<const Complex> f, const BesovSpec& spec) {
  const std::array<std::span<const Complex>, 1> g{f};
  return besov_norm(partition, g, spec);
}

double besov_norm(const DyadicPartition& partition, SpectralTransform& fft, std::span<const double> f,
                  const BesovSpec& spec) {
  const SpectralField fh = fft.forward(f);
  return besov_norm(partition, std::span<const Complex>(fh), spec);
}

SpectralField fractional_derivative(const Grid& grid, std::span<const Complex> f, double alpha) {
  if (f.size() != grid.spectral_size()) throw ConfigError("fractional_derivative: field size does not match grid");
  SpectralField out(f.begin(), f.end());
  if (alpha == 0.0) return out;
  if (alpha < 0.0 && std::abs(f[0]) > mean_tolerance(f))
    throw DomainError("fractional_derivative: negative order requires a zero-mean field");
  out[0] = 0.0;
  for (std::size_t k = 1; k < out.size(); ++k) out[k] *= std::pow(grid.wavenumber_squared(k), 0.5 * alpha);
  return out;
}

RealField fractional_derivative(SpectralTransform& fft, std::span<const double> f, double alpha) {
  return fft.inverse(fractional_derivative(fft.grid(), fft.forward(f), alpha));
}

double derivative_l2_norm(const Grid& grid, std::span<const std::span<const Complex>> group, double alpha) {
  double e = 0.0;
  for (const auto& f : group) {
    if (alpha < 0.0 && std::abs(f[0]) > mean_tolerance(f))
      throw DomainError("derivative_l2_norm: negative order requires a zero-mean field");
    for (std::size_t k = alpha == 0.0 ? 0 : 1; k < f.size(); ++k) {
      double w = grid.parseval_weight(k) * std::norm(f[k]);
      if (alpha != 0.0) w *= std::pow(grid.wavenumber_squared(k), alpha);
      e += w;
    }
  }
  return std::sqrt(grid.box_volume() * e);
}

double l1_norm(const Grid& grid, std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += std::abs(v);
  return grid.cell_volume() * s;
}

}  // namespace epdecay
