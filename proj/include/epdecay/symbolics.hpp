#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace epdecay {

using Matrix8d = Eigen::Matrix<double, 8, 8>;
using SymbolMatrix = Eigen::Matrix<std::complex<double>, 11, 11>;
using CompensatorMatrix = Matrix8d;
using StateVector = Eigen::Matrix<std::complex<double>, 11, 1>;
using ReducedVector = Eigen::Matrix<std::complex<double>, 8, 1>;
using ComplexVector3 = Eigen::Matrix<std::complex<double>, 3, 1>;

/// Symmetric flux matrices A_j(0), j = 1..3, and the relaxation matrix
/// L = diag(0, I3, 0, I3) of the reduced state (sigma_e, u_e, sigma_i, u_i).
struct FluxMatrices {
  std::array<Matrix8d, 3> a;
  Matrix8d relaxation;
};
FluxMatrices flux_matrices();

/// Skew-symmetric compensator K(xi), depending on xi / |xi| only.
/// Throws DomainError for xi = 0.
CompensatorMatrix compensator(const Eigen::Vector3d& xi);

/// blockdiag(|xi|, -xi xi^T / |xi|, |xi|, -xi xi^T / |xi|): the value of
/// K(xi) sum_j xi_j A_j(0).
Matrix8d compensator_identity_target(const Eigen::Vector3d& xi);
/// Frobenius norm of K(xi) sum_j xi_j A_j(0) minus its target.
double compensator_identity_residual(const Eigen::Vector3d& xi);

/// Symbol of the linearized system, d/dt w = -A(xi) w, with Fourier kernel
/// e^{-i x.xi} (so grad -> i xi). State order (sigma_e, u_e, sigma_i, u_i, E).
SymbolMatrix symbol_matrix(const Eigen::Vector3d& xi);

/// One frequency of the full state w = (sigma_e, u_e, sigma_i, u_i, E).
class SpectralVector {
 public:
  static constexpr int kSigmaE = 0;
  static constexpr int kUe = 1;
  static constexpr int kSigmaI = 4;
  static constexpr int kUi = 5;
  static constexpr int kE = 8;

  SpectralVector(const Eigen::Vector3d& xi, const StateVector& values);

  /// Builds E from the constraint: E = xi (sigma_e - sigma_i) / (i |xi|^2).
  static SpectralVector constrained(const Eigen::Vector3d& xi, std::complex<double> sigma_e,
                                    const ComplexVector3& u_e, std::complex<double> sigma_i,
                                    const ComplexVector3& u_i);

  const Eigen::Vector3d& xi() const noexcept { return xi_; }
  const StateVector& values() const noexcept { return values_; }
  ReducedVector reduced() const { return values_.head<8>(); }
  ComplexVector3 e() const { return values_.segment<3>(kE); }

  /// (|xi x E| + |i xi.E - (sigma_e - sigma_i)|) / (|xi||E| + |sigma_e| + |sigma_i|).
  double constraint_residual() const;
  /// Both constraint relations hold to 1e-10 relative.
  bool is_constrained() const;

 private:
  Eigen::Vector3d xi_;
  StateVector values_;
};

/// Re<w, -A(xi) w> + |u_e|^2 + |u_i|^2, relative to |w| |A(xi) w| (the size
/// of the summed terms; 0 for w = 0). Vanishes to round-off whenever E is
/// parallel to xi; a transverse E leaves Re<(I - P)E, u_e - u_i>.
double energy_identity_residual(const Eigen::Vector3d& xi, const StateVector& w);

/// 1/2 |w|^2 + kappa/2 Im<|xi|/(1+|xi|^2) K(xi) v, v> with v the first
/// eight components and <a, b> = sum a_j conj(b_j).
double lyapunov(const Eigen::Vector3d& xi, const StateVector& w, double kappa);

struct DecrementCheck {
  /// d/dt of the Lyapunov functional along d/dt w = -A w.
  double decrement = 0.0;
  /// kappa |xi|^2 / (2(1+|xi|^2)) |v|^2 + kappa / (1+|xi|^2) |i xi.E|^2.
  double dissipation = 0.0;
  bool pass = false;
};
/// Throws PreconditionError for data off the constraint manifold.
DecrementCheck lyapunov_decrement_check(const SpectralVector& w, double kappa);

/// Parallel block of A(r e_1) in (sigma_e, u_e1, sigma_i, u_i1, E_1).
Eigen::Matrix<std::complex<double>, 5, 5> parallel_block(double r);
/// Parallel block restricted to the constraint E_1 = (sigma_e - sigma_i) / (i r),
/// in (sigma_e, u_e1, sigma_i, u_i1).
Eigen::Matrix<std::complex<double>, 4, 4> constrained_parallel_block(double r);

/// Eigenvalues of the constrained parallel block, sorted by real part.
std::array<std::complex<double>, 4> constrained_parallel_eigenvalues(double r);

/// min Re(lambda) over the constrained spectrum of A(xi), |xi| = r.
/// Throws DomainError for r <= 0.
double constrained_decay_exponent(double r);
/// Closed forms of the two parallel branches: the sum branch
/// lambda^2 - lambda + r^2 = 0 and the difference branch
/// lambda^2 - lambda + r^2 + 2 = 0 (Re lambda = 1/2).
double sum_branch_rate(double r);
double difference_branch_rate(double r);

/// exp(-A(xi) t), t >= 0.
SymbolMatrix propagator(const Eigen::Vector3d& xi, double t);
StateVector propagate(const Eigen::Vector3d& xi, const StateVector& w0, double t);
SpectralVector propagate(const SpectralVector& w0, double t);

/// Orthonormal basis (11 x 8) of the constraint subspace at xi.
Eigen::Matrix<std::complex<double>, 11, 8> constraint_basis(const Eigen::Vector3d& xi);
/// Operator 2-norm of exp(-A(r e_1) t) restricted to the constraint subspace.
double constrained_propagator_norm(double r, double t);

/// |xi|^2 / (1 + |xi|^2).
inline double dissipation_profile(double r) { return r * r / (1.0 + r * r); }

}  // namespace epdecay
