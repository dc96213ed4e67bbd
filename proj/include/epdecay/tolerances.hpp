#pragma once

// Default tolerances and pinned constants shared by the CLI checks and the
// acceptance suite. Every pass/fail threshold used by a verdict lives here.

namespace epdecay::tolerances {

/// Weight of the compensator correction in the Lyapunov functional.
inline constexpr double kLyapunovKappa = 0.05;

/// Frobenius residual of K(xi) * sum_j xi_j A_j(0) against its block form,
/// relative to |xi|.
inline constexpr double kCompensatorIdentity = 1e-12;
inline constexpr double kSkewSymmetry = 1e-14;
/// Relative residual of the per-frequency energy identity.
inline constexpr double kEnergyIdentity = 1e-12;
/// Slack in dE/dt + dissipation <= slack * |w|^2.
inline constexpr double kLyapunovDecrement = 1e-10;
/// Relative test for membership of the constraint manifold.
inline constexpr double kConstraint = 1e-10;

/// constrained_decay_exponent(r) >= kSpectralEnvelope * r^2/(1+r^2).
inline constexpr double kSpectralEnvelope = 0.4;
/// Agreement of the computed exponent with the two analytic branches.
inline constexpr double kBranchFormula = 1e-8;
/// Semigroup bound |e^{-A t}|_constrained * e^{rate eta t} <= constant.
inline constexpr double kSemigroupRate = 0.3;
inline constexpr double kSemigroupConstant = 20.0;
inline constexpr double kRotationalCovariance = 1e-10;
inline constexpr double kMatrixExponential = 1e-10;

/// Fitted power-law exponents on the quadrature path.
inline constexpr double kQuadratureExponent = 0.05;
/// Fitted velocity-minus-density exponent gap.
inline constexpr double kHalfRateGap = 0.07;

/// Difference (plasma-oscillation) system: minimum fitted rate and R^2.
inline constexpr double kDifferenceMinRate = 0.45;
inline constexpr double kDifferenceMinR2 = 0.999;

/// Grid solver invariants.
inline constexpr double kMassDrift = 1e-10;
inline constexpr double kConstraintResidual = 1e-10;
/// |curl E| / |E| (E is built as a gradient).
inline constexpr double kIrrotationality = 1e-12;
inline constexpr double kLinearModeAgreement = 1e-8;
inline constexpr double kGridDecaySlope = 0.2;
inline constexpr double kEnergyFunctionalGrowth = 2.0;

/// Littlewood-Paley suite.
inline constexpr double kPartitionOfUnity = 1e-12;
inline constexpr double kEmbeddingSlack = 1e-8;
inline constexpr double kInterpolationConstant = 10.0;

/// Synthetic fit recovery.
inline constexpr double kSyntheticFit = 1e-6;

}  // namespace epdecay::tolerances
