#include <cmath>
#include <numbers>

#include "doctest.h"

#include "epdecay/errors.hpp"
#include "epdecay/lp_besov.hpp"
#include "epdecay/random.hpp"

using namespace epdecay;

namespace {

constexpr double kPi = std::numbers::pi;

// Real single mode cos(k.x) stored in the half spectrum.
SpectralField cosine_mode(const Grid& g, const std::array<int, 3>& m, double amplitude = 1.0) {
  SpectralField f(g.spectral_size(), 0.0);
  f[g.spectral_index(m)] = 0.5 * amplitude;
  return f;
}

}  // namespace

TEST_CASE("bump profile support and plateau") {
  CHECK(bump_profile(0.5) == 0.0);
  CHECK(bump_profile(0.75) == 0.0);
  CHECK(bump_profile(2.7) == 0.0);
  CHECK(bump_profile(1.0) == doctest::Approx(1.0));
  CHECK(bump_profile(1.5) == doctest::Approx(1.0));
  CHECK(bump_profile(0.9) > 0.0);
}

TEST_CASE("dyadic multipliers sum to one at random frequencies") {
  Rng rng(11);
  double worst = 0.0, worst_inhom = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double r = std::exp(rng.uniform(std::log(1e-4), std::log(1e4)));
    auto [lo, hi] = active_blocks(r);
    CHECK(hi - lo <= 1);
    double sum = 0.0;
    for (int q = lo - 2; q <= hi + 2; ++q) sum += dyadic_multiplier(q, r);
    worst = std::max(worst, std::abs(sum - 1.0));
    double inhom = low_frequency_multiplier(r);
    for (int q = 0; q <= hi + 2; ++q) inhom += dyadic_multiplier(q, r);
    worst_inhom = std::max(worst_inhom, std::abs(inhom - 1.0));
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_inhom <= 1e-12);
}

TEST_CASE("dyadic multiplier vanishes outside its annulus") {
  for (int q : {-3, 0, 2, 5}) {
    double s = std::ldexp(1.0, q);
    CHECK(dyadic_multiplier(q, 0.74 * s) == 0.0);
    CHECK(dyadic_multiplier(q, 2.67 * s) == 0.0);
    CHECK(dyadic_multiplier(q, 0.0) == 0.0);
    CHECK(dyadic_multiplier(q, 1.5 * s) == doctest::Approx(1.0));
  }
  CHECK(low_frequency_multiplier(0.5) == 1.0);
  CHECK_THROWS_AS(active_blocks(0.0), DomainError);
}

TEST_CASE("partition rejects ranges that the grid cannot resolve") {
  Grid g(3, 16, 2.0 * kPi);
  auto [lo, hi] = DyadicPartition::covering_range(g);
  CHECK_THROWS_AS(DyadicPartition(g, lo - 1, hi), ConfigError);
  CHECK_THROWS_AS(DyadicPartition(g, lo, lo - 1), ConfigError);
  CHECK_NOTHROW(DyadicPartition(g, lo, hi));
}

TEST_CASE("low-frequency block leaves a |xi| = 1/4 mode unchanged") {
  Grid g(3, 16, 8.0 * kPi);  // fundamental 1/4
  auto p = DyadicPartition::covering(g);
  auto f = cosine_mode(g, {1, 0, 0});
  auto low = dyadic_block(p, f, -1, false);
  double err = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) err = std::max(err, std::abs(low[k] - f[k]));
  CHECK(err <= 1e-10);
  CHECK(l2_norm(g, dyadic_block(p, f, 0, false)) == 0.0);
  CHECK(l2_norm(g, dyadic_block(p, f, -2, false)) == 0.0);
}

TEST_CASE("blocks of a band-limited field are disjoint from far annuli") {
  Grid g(3, 32, 2.0 * kPi);
  auto p = DyadicPartition::covering(g);
  // |m| = 6 lies in the plateau [4, 8] of block q = 2 only.
  auto f = cosine_mode(g, {6, 0, 0});
  for (int q = p.q_min(); q <= p.q_max(); ++q) {
    double n = l2_norm(g, dyadic_block(p, f, q, true));
    if (std::abs(q - 2) >= 1) {
      CHECK(n == 0.0);
    } else {
      CHECK(n == doctest::Approx(l2_norm(g, f)));
    }
  }
}

TEST_CASE("Besov norms of zero and of a unit band-limited field") {
  Grid g(3, 32, 2.0 * kPi);
  auto p = DyadicPartition::covering(g);
  SpectralField zero(g.spectral_size(), 0.0);
  CHECK(besov_norm(p, zero, BesovSpec{1.0, SumIndex::One, true}) == 0.0);

  Rng rng(5);
  for (double s : {-1.5, -0.5, 0.5, 1.0}) {
    for (int q = 1; q <= 3; ++q) {
      SpectralField f(g.spectral_size(), 0.0);
      const double lo = 0.75 * std::ldexp(1.0, q), hi = 8.0 / 3.0 * std::ldexp(1.0, q);
      for (std::size_t k = 1; k < f.size(); ++k) {
        double r = g.wavenumber(k);
        if (r > lo && r < hi && !g.is_nyquist(k) && g.mode(k)[2] > 0) f[k] = Complex(rng.normal(), rng.normal());
      }
      double n0 = l2_norm(g, f);
      for (auto& c : f) c /= n0;
      double b = besov_norm(p, f, BesovSpec{s, SumIndex::Infinity, true});
      double scale = std::pow(2.0, q * s);
      // Blocks q-1, q, q+1 contribute with weights 2^{(q +- 1) s}.
      CHECK(b >= 0.25 * scale * std::pow(2.0, -std::abs(s)));
      CHECK(b <= scale * std::pow(2.0, std::abs(s)) + 1e-12);
    }
  }
}

TEST_CASE("fractional derivative examples") {
  Grid g(1, 32, 2.0 * kPi);
  SpectralTransform fft(g);
  const int m = 3;
  RealField f(g.real_size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(m * g.position(i)[0]) + 0.5;
  auto id = fractional_derivative(fft, f, 0.0);
  double err0 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err0 = std::max(err0, std::abs(id[i] - f[i]));
  CHECK(err0 < 1e-14);

  auto d = fractional_derivative(fft, f, 1.0);
  double err1 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err1 = std::max(err1, std::abs(d[i] - m * std::sin(m * g.position(i)[0])));
  CHECK(err1 < 1e-13);

  CHECK_THROWS_AS(fractional_derivative(fft, f, -1.0), DomainError);
  for (auto& v : f) v -= 0.5;
  auto inv = fractional_derivative(fft, f, -1.0);
  double err2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err2 = std::max(err2, std::abs(inv[i] - std::sin(m * g.position(i)[0]) / m));
  CHECK(err2 < 1e-14);
}

TEST_CASE("derivative L2 norm matches the materialized derivative") {
  Grid g(3, 16, 7.0);
  Rng rng(9);
  SpectralTransform fft(g);
  RealField f(g.real_size());
  for (auto& v : f) v = rng.normal();
  auto c = fft.forward(f);
  c[0] = 0.0;
  std::span<const Complex> group[] = {c};
  for (double a : {-1.0, 0.5, 2.0}) {
    auto d = fractional_derivative(g, c, a);
    CHECK(derivative_l2_norm(g, group, a) == doctest::Approx(l2_norm(g, d)).epsilon(1e-12));
  }
}

TEST_CASE("discrete L1 norm") {
  Grid g(2, 8, 2.0);
  RealField f(g.real_size(), -0.5);
  CHECK(l1_norm(g, f) == doctest::Approx(2.0));
}
