#include <cmath>

#include "doctest.h"

#include "epdecay/errors.hpp"
#include "epdecay/random.hpp"
#include "epdecay/symbolics.hpp"

using namespace epdecay;
using cd = std::complex<double>;

namespace {

Eigen::Vector3d random_xi(Rng& rng) {
  Eigen::Vector3d xi(rng.normal(), rng.normal(), rng.normal());
  return xi * std::exp(rng.uniform(-4.0, 4.0)) / xi.norm();
}

ComplexVector3 random_c3(Rng& rng) {
  ComplexVector3 v;
  for (int j = 0; j < 3; ++j) v(j) = cd(rng.normal(), rng.normal());
  return v;
}

SpectralVector random_constrained(Rng& rng) {
  return SpectralVector::constrained(random_xi(rng), cd(rng.normal(), rng.normal()), random_c3(rng),
                                     cd(rng.normal(), rng.normal()), random_c3(rng));
}

}  // namespace

TEST_CASE("flux matrices") {
  auto f = flux_matrices();
  Eigen::Matrix<double, 1, 8> row;
  row << 0, 1, 0, 0, 0, 0, 0, 0;
  CHECK((f.a[0].row(0) - row).norm() == 0.0);
  for (const auto& a : f.a) CHECK((a - a.transpose()).norm() == 0.0);
  CHECK((f.relaxation * f.relaxation - f.relaxation).norm() == 0.0);
  CHECK(f.relaxation.trace() == 6.0);
}

TEST_CASE("compensator identity and scale invariance") {
  auto f = flux_matrices();
  Eigen::Vector3d e1(1, 0, 0);
  Matrix8d ka = compensator(e1) * f.a[0];
  CHECK(ka(0, 0) == doctest::Approx(1.0));
  Eigen::Matrix3d vel = ka.block<3, 3>(1, 1);
  Eigen::Matrix3d expect = -e1 * e1.transpose();
  CHECK((vel - expect).norm() < 1e-15);

  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto xi = random_xi(rng);
    CHECK(compensator_identity_residual(xi) <= 1e-12 * xi.norm());
    CHECK((compensator(2.0 * xi) - compensator(xi)).norm() < 1e-15);
    auto k = compensator(xi);
    CHECK((k + k.transpose()).norm() < 1e-15);
  }
  CHECK_THROWS_AS(compensator(Eigen::Vector3d::Zero()), DomainError);
  CHECK_THROWS_AS(symbol_matrix(Eigen::Vector3d::Zero()), DomainError);
}

TEST_CASE("energy identity for E parallel to xi") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    auto w = random_constrained(rng);
    CHECK(energy_identity_residual(w.xi(), w.values()) <= 1e-12);
  }
}

TEST_CASE("constraint is conserved by the symbol") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    auto w = random_constrained(rng);
    StateVector dw = -symbol_matrix(w.xi()) * w.values();
    const auto& xi = w.xi();
    cd rate = cd(0, 1) * (xi(0) * dw(8) + xi(1) * dw(9) + xi(2) * dw(10)) - dw(0) + dw(4);
    CHECK(std::abs(rate) <= 1e-12 * (1.0 + xi.norm()) * dw.norm());
  }
}

TEST_CASE("transverse E is stationary") {
  Eigen::Vector3d xi(0.3, -1.2, 0.7);
  StateVector w = StateVector::Zero();
  Eigen::Vector3d t = xi.cross(Eigen::Vector3d(1, 0, 0));
  for (int j = 0; j < 3; ++j) w(8 + j) = t(j);
  StateVector dw = -symbol_matrix(xi) * w;
  CHECK(dw.segment<3>(8).norm() < 1e-15);
}

TEST_CASE("Lyapunov functional") {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    auto w = random_constrained(rng);
    double n2 = w.values().squaredNorm();
    CHECK(lyapunov(w.xi(), w.values(), 0.0) == doctest::Approx(0.5 * n2).epsilon(1e-14));
    double l = lyapunov(w.xi(), w.values(), 0.05);
    CHECK(l >= 0.25 * n2);
    CHECK(l <= 0.75 * n2);
  }
  CHECK_THROWS_AS(lyapunov(Eigen::Vector3d::Zero(), StateVector::Zero(), 0.05), DomainError);
}

TEST_CASE("Lyapunov decrement examples") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    auto w = random_constrained(rng);
    auto c0 = lyapunov_decrement_check(w, 0.0);
    double u2 = w.values().segment<3>(1).squaredNorm() + w.values().segment<3>(5).squaredNorm();
    CHECK(c0.decrement == doctest::Approx(-u2).epsilon(1e-12));
    CHECK(lyapunov_decrement_check(w, 0.05).pass);
  }
  // Equal densities at rest: dissipation comes only from the |xi|^2 term.
  auto w = SpectralVector::constrained(Eigen::Vector3d(0.4, 0.2, -0.1), cd(1.0, 0.5), ComplexVector3::Zero(),
                                       cd(1.0, 0.5), ComplexVector3::Zero());
  auto c = lyapunov_decrement_check(w, 0.05);
  double r2 = w.xi().squaredNorm();
  CHECK(c.dissipation == doctest::Approx(0.05 * r2 / (2.0 * (1.0 + r2)) * w.reduced().squaredNorm()));
  CHECK(c.pass);

  StateVector bad = w.values();
  bad(8) = 1.0;
  CHECK_THROWS_AS(lyapunov_decrement_check(SpectralVector(w.xi(), bad), 0.05), PreconditionError);
}

TEST_CASE("constrained decay exponent examples") {
  CHECK(constrained_decay_exponent(1.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(constrained_decay_exponent(0.1) - 0.010102) <= 1e-4);
  CHECK(std::abs(constrained_decay_exponent(100.0) - 0.5) <= 1e-6);
  CHECK_THROWS_AS(constrained_decay_exponent(0.0), DomainError);
  CHECK_THROWS_AS(constrained_decay_exponent(-1.0), DomainError);
  for (double r : {1e-3, 0.2, 0.7, 3.0, 1e3}) {
    CHECK(constrained_decay_exponent(r) ==
          doctest::Approx(std::min({sum_branch_rate(r), difference_branch_rate(r), 1.0})).epsilon(1e-8));
    CHECK(constrained_decay_exponent(r) >= 0.4 * dissipation_profile(r));
  }
  auto ev = constrained_parallel_eigenvalues(0.1);
  CHECK(ev[0].real() == doctest::Approx(0.5 * (1.0 - std::sqrt(1.0 - 0.04))).epsilon(1e-10));
}

TEST_CASE("propagator examples") {
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    auto w = random_constrained(rng);
    auto id = propagate(w.xi(), w.values(), 0.0);
    CHECK((id - w.values()).norm() <= 1e-15 * w.values().norm());
    double t = rng.uniform(0.0, 5.0), s = rng.uniform(0.0, 5.0);
    auto a = propagate(w.xi(), w.values(), t + s);
    auto b = propagate(w.xi(), propagate(w.xi(), w.values(), s), t);
    CHECK((a - b).norm() <= 1e-10 * std::max(a.norm(), 1e-300));
    CHECK(propagate(w, t).is_constrained());
  }
  Eigen::Vector3d xi(0.0, 0.0, 2.0);
  StateVector w = StateVector::Zero();
  w(1) = cd(1.0, -2.0);
  w(6) = 0.5;
  for (double t : {0.5, 2.0, 7.0}) {
    auto wt = propagate(xi, w, t);
    CHECK(std::abs(wt.norm() - std::exp(-t) * w.norm()) <= 1e-12 * w.norm());
  }
  CHECK_THROWS_AS(propagator(xi, -1.0), DomainError);
}

TEST_CASE("constrained propagator norm is bounded") {
  for (double r : {0.01, 1.0, 10.0})
    for (double t : {0.0, 1.0, 10.0}) CHECK(constrained_propagator_norm(r, t) <= 20.0);
  CHECK(constrained_propagator_norm(1.0, 0.0) == doctest::Approx(1.0));
}
