#include "epdecay/symbolics.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "epdecay/errors.hpp"
#include "epdecay/tolerances.hpp"

namespace epdecay {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

double checked_norm(const Eigen::Vector3d& xi, const char* who) {
  const double r = xi.norm();
  if (!(r > 0.0)) throw DomainError(std::string(who) + ": xi must be nonzero");
  return r;
}

}  // namespace

FluxMatrices flux_matrices() {
  FluxMatrices m;
  for (int j = 0; j < 3; ++j) {
    Matrix8d a = Matrix8d::Zero();
    for (int base : {0, 4}) {
      a(base, base + 1 + j) = 1.0;
      a(base + 1 + j, base) = 1.0;
    }
    m.a[static_cast<std::size_t>(j)] = a;
  }
  m.relaxation = Matrix8d::Zero();
  for (int j = 0; j < 3; ++j) {
    m.relaxation(1 + j, 1 + j) = 1.0;
    m.relaxation(5 + j, 5 + j) = 1.0;
  }
  return m;
}

CompensatorMatrix compensator(const Eigen::Vector3d& xi) {
  const Eigen::Vector3d n = xi / checked_norm(xi, "compensator");
  CompensatorMatrix k = CompensatorMatrix::Zero();
  for (int base : {0, 4}) {
    k.block<1, 3>(base, base + 1) = n.transpose();
    k.block<3, 1>(base + 1, base) = -n;
  }
  return k;
}

Matrix8d compensator_identity_target(const Eigen::Vector3d& xi) {
  const double r = checked_norm(xi, "compensator_identity_target");
  Matrix8d t = Matrix8d::Zero();
  for (int base : {0, 4}) {
    t(base, base) = r;
    t.block<3, 3>(base + 1, base + 1) = -xi * xi.transpose() / r;
  }
  return t;
}

double compensator_identity_residual(const Eigen::Vector3d& xi) {
  const FluxMatrices f = flux_matrices();
  const Matrix8d flux = xi(0) * f.a[0] + xi(1) * f.a[1] + xi(2) * f.a[2];
  return (compensator(xi) * flux - compensator_identity_target(xi)).norm();
}

SymbolMatrix symbol_matrix(const Eigen::Vector3d& xi) {
  const double r = checked_norm(xi, "symbol_matrix");
  constexpr int e = SpectralVector::kE;
  const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
  const Eigen::Vector3cd ixi = kI * xi.cast<cd>();
  const Eigen::Matrix3cd proj = (xi * xi.transpose() / (r * r)).cast<cd>();

  SymbolMatrix a = SymbolMatrix::Zero();
  const int bases[2] = {SpectralVector::kSigmaE, SpectralVector::kSigmaI};
  const double charge[2] = {-1.0, 1.0};
  for (int s = 0; s < 2; ++s) {
    const int b = bases[s];
    a.block<1, 3>(b, b + 1) = ixi.transpose();
    a.block<3, 1>(b + 1, b) = ixi;
    a.block<3, 3>(b + 1, b + 1) = id;
    a.block<3, 3>(b + 1, e) = charge[s] * id;
    // d/dt E = -grad Lap^{-1} div(u_e - u_i)  ->  -P(u_e - u_i)
    a.block<3, 3>(e, b + 1) = -charge[s] * proj;
  }
  return a;
}

SpectralVector::SpectralVector(const Eigen::Vector3d& xi, const StateVector& values) : xi_(xi), values_(values) {
  checked_norm(xi, "SpectralVector");
}

SpectralVector SpectralVector::constrained(const Eigen::Vector3d& xi, cd sigma_e, const ComplexVector3& u_e,
                                           cd sigma_i, const ComplexVector3& u_i) {
  const double r = checked_norm(xi, "SpectralVector::constrained");
  StateVector w;
  w(kSigmaE) = sigma_e;
  w.segment<3>(kUe) = u_e;
  w(kSigmaI) = sigma_i;
  w.segment<3>(kUi) = u_i;
  w.segment<3>(kE) = xi.cast<cd>() * ((sigma_e - sigma_i) / (kI * r * r));
  return SpectralVector(xi, w);
}

double SpectralVector::constraint_residual() const {
  const Eigen::Vector3cd xc = xi_.cast<cd>();
  const Eigen::Vector3cd ev = e();
  const double curl = xc.cross(ev).norm();
  const double div = std::abs(kI * (xc.transpose() * ev)(0) - (values_(kSigmaE) - values_(kSigmaI)));
  const double scale = xi_.norm() * ev.norm() + std::abs(values_(kSigmaE)) + std::abs(values_(kSigmaI));
  return scale > 0.0 ? (curl + div) / scale : 0.0;
}

bool SpectralVector::is_constrained() const { return constraint_residual() <= tolerances::kConstraint; }

double energy_identity_residual(const Eigen::Vector3d& xi, const StateVector& w) {
  const StateVector rhs = -(symbol_matrix(xi) * w);
  const double scale = w.norm() * rhs.norm();
  if (scale == 0.0) return 0.0;
  const double power = w.dot(rhs).real();  // Eigen's dot conjugates the first argument
  const double damping = w.segment<3>(SpectralVector::kUe).squaredNorm() + w.segment<3>(SpectralVector::kUi).squaredNorm();
  return (power + damping) / scale;
}

namespace {

/// Im <K v, x> = Im(x^H K v).
double skew_form(const CompensatorMatrix& k, const ReducedVector& v, const ReducedVector& x) {
  return (x.adjoint() * (k.cast<cd>() * v))(0).imag();
}

}  // namespace

double lyapunov(const Eigen::Vector3d& xi, const StateVector& w, double kappa) {
  const double r = checked_norm(xi, "lyapunov");
  const ReducedVector v = w.head<8>();
  return 0.5 * w.squaredNorm() + 0.5 * kappa * (r / (1.0 + r * r)) * skew_form(compensator(xi), v, v);
}

DecrementCheck lyapunov_decrement_check(const SpectralVector& sv, double kappa) {
  if (!sv.is_constrained())
    throw PreconditionError("lyapunov_decrement_check: input violates div E = sigma_e - sigma_i or curl E = 0");
  const Eigen::Vector3d& xi = sv.xi();
  const double r = xi.norm();
  const StateVector& w = sv.values();
  const StateVector wt = -(symbol_matrix(xi) * w);
  const ReducedVector v = w.head<8>();
  const ReducedVector vt = wt.head<8>();
  const CompensatorMatrix k = compensator(xi);
  const double weight = r / (1.0 + r * r);

  DecrementCheck out;
  out.decrement = w.dot(wt).real() + 0.5 * kappa * weight * (skew_form(k, vt, v) + skew_form(k, v, vt));
  const cd div_e = kI * (xi.cast<cd>().transpose() * sv.e())(0);
  out.dissipation = kappa * r * r / (2.0 * (1.0 + r * r)) * v.squaredNorm() + kappa / (1.0 + r * r) * std::norm(div_e);
  out.pass = out.decrement + out.dissipation <= tolerances::kLyapunovDecrement * w.squaredNorm();
  return out;
}

Eigen::Matrix<cd, 5, 5> parallel_block(double r) {
  if (!(r > 0.0)) throw DomainError("parallel_block: r must be positive");
  Eigen::Matrix<cd, 5, 5> m = Eigen::Matrix<cd, 5, 5>::Zero();
  m(0, 1) = kI * r;
  m(1, 0) = kI * r;
  m(1, 1) = 1.0;
  m(1, 4) = -1.0;
  m(2, 3) = kI * r;
  m(3, 2) = kI * r;
  m(3, 3) = 1.0;
  m(3, 4) = 1.0;
  m(4, 1) = 1.0;
  m(4, 3) = -1.0;
  return m;
}

Eigen::Matrix<cd, 4, 4> constrained_parallel_block(double r) {
  const Eigen::Matrix<cd, 5, 5> m = parallel_block(r);
  Eigen::Matrix<cd, 5, 4> lift = Eigen::Matrix<cd, 5, 4>::Zero();
  lift.topRows<4>().setIdentity();
  lift(4, 0) = 1.0 / (kI * r);
  lift(4, 2) = -1.0 / (kI * r);
  return (m * lift).topRows<4>();
}

std::array<cd, 4> constrained_parallel_eigenvalues(double r) {
  if (!(r > 0.0)) throw DomainError("constrained_parallel_eigenvalues: r must be positive");
  const Eigen::ComplexEigenSolver<Eigen::Matrix<cd, 4, 4>> solver(constrained_parallel_block(r), false);
  std::array<cd, 4> out;
  for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  std::sort(out.begin(), out.end(), [](const cd& a, const cd& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

double constrained_decay_exponent(double r) {
  if (!(r > 0.0)) throw DomainError("constrained_decay_exponent: r must be positive");
  double rate = 1.0;  // transverse velocities relax at rate 1
  for (const cd& l : constrained_parallel_eigenvalues(r)) rate = std::min(rate, l.real());
  return rate;
}

double sum_branch_rate(double r) {
  const double disc = 1.0 - 4.0 * r * r;
  // (1 - sqrt(disc)) / 2 written without cancellation for small r
  return disc > 0.0 ? 2.0 * r * r / (1.0 + std::sqrt(disc)) : 0.5;
}

double difference_branch_rate(double) { return 0.5; }

SymbolMatrix propagator(const Eigen::Vector3d& xi, double t) {
  if (!(t >= 0.0)) throw DomainError("propagator: t must be nonnegative");
  if (t == 0.0) {
    checked_norm(xi, "propagator");
    return SymbolMatrix::Identity();
  }
  const SymbolMatrix m = -symbol_matrix(xi) * t;
  return m.exp();
}

StateVector propagate(const Eigen::Vector3d& xi, const StateVector& w0, double t) { return propagator(xi, t) * w0; }

SpectralVector propagate(const SpectralVector& w0, double t) {
  return SpectralVector(w0.xi(), propagate(w0.xi(), w0.values(), t));
}

Eigen::Matrix<cd, 11, 8> constraint_basis(const Eigen::Vector3d& xi) {
  const double r = checked_norm(xi, "constraint_basis");
  Eigen::Matrix<cd, 11, 8> spanning = Eigen::Matrix<cd, 11, 8>::Zero();
  spanning.topRows<8>().setIdentity();
  const Eigen::Vector3cd field = xi.cast<cd>() / (kI * r * r);
  spanning.block<3, 1>(SpectralVector::kE, SpectralVector::kSigmaE) = field;
  spanning.block<3, 1>(SpectralVector::kE, SpectralVector::kSigmaI) = -field;
  const Eigen::HouseholderQR<Eigen::Matrix<cd, 11, 8>> qr(spanning);
  return qr.householderQ() * Eigen::Matrix<cd, 11, 8>::Identity();
}

double constrained_propagator_norm(double r, double t) {
  const Eigen::Vector3d xi(r, 0.0, 0.0);
  const Eigen::Matrix<cd, 11, 8> image = propagator(xi, t) * constraint_basis(xi);
  const Eigen::JacobiSVD<Eigen::Matrix<cd, 11, 8>> svd(image);
  return svd.singularValues()(0);
}

}  // namespace epdecay
