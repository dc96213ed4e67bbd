#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "epdecay/lp_besov.hpp"

namespace epdecay {

/// Isotropic constrained data in frequency space, as functions of r = |xi|:
/// densities sigma_a(r) and velocity potentials phi_a(r) with u_a = i xi phi_a.
/// E is fixed by the constraint, E_par = (sigma_e - sigma_i) / (i r).
struct RadialProfile {
  std::string name;
  std::function<double(double)> sigma_e;
  std::function<double(double)> sigma_i;
  std::function<double(double)> phi_e;
  std::function<double(double)> phi_i;
  /// Truncation radius of the quadrature.
  double r_max = 10.0;
  /// Regularity index s of the data in the negative Besov scale.
  double s = 1.5;

  /// Transforms of Gaussian bumps with total masses m_a and widths w_a:
  /// sigma_a(r) = m_a exp(-w_a^2 r^2 / 2); phi_a(r) = v exp(-w_a^2 r^2 / 2).
  /// Nonzero mass gives the p = 1, s = 3/2 regime.
  static RadialProfile gaussian_mass(double mass_e = 1.0, double width_e = 1.0, double mass_i = 1.0,
                                     double width_i = 1.25, double velocity = 0.5);
  /// sigma_a(r) = r^{s - 3/2} exp(-w_a^2 r^2 / 2), s in (0, 3/2]: data with
  /// finite homogeneous B^{-s}_{2,inf} norm. s = 3/2 reduces to unit masses.
  static RadialProfile power_law(double s, double width = 1.0, double velocity = 0.5);
};

enum class NormGroup {
  DensitiesField,     ///< {sigma_e, sigma_i, E}
  Velocities,         ///< {u_e, u_i}
  DensityDifference,  ///< {sigma_e - sigma_i}
  NonDegenerate,      ///< {u_e, u_i, sigma_e - sigma_i}
};
std::string to_string(NormGroup group);
NormGroup parse_norm_group(const std::string& text);

/// Composite Gauss-Legendre rule on (0, r_max]: one panel on [0, r_min],
/// log-spaced panels on [r_min, 1] and uniform panels on [1, r_max].
struct QuadratureOptions {
  double r_min = 1e-7;
  int order = 8;
  int log_panels = 84;
  int uniform_panels = 42;
  /// Admissible tail beyond r_max, relative to the t = 0 norm.
  double tail_tolerance = 1e-6;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static QuadratureRule composite(double r_max, const QuadratureOptions& options = {});
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Squared group magnitudes |component of exp(-A(r e_1) t) w0(r)|^2 per
/// time and node, for all four groups.
class RadialEvolution {
 public:
  RadialEvolution(const RadialProfile& profile, std::span<const double> times, const QuadratureOptions& options = {});

  const RadialProfile& profile() const noexcept { return profile_; }
  const QuadratureRule& rule() const noexcept { return rule_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const QuadratureOptions& options() const noexcept { return options_; }
  double density(NormGroup group, std::size_t time_index, std::size_t node) const;

  /// 4 pi int r^{2 ell + 2} g(r, t) dr at every time, square-rooted.
  /// Throws ConfigError if the profile tail beyond r_max exceeds the
  /// tolerance for this ell.
  std::vector<double> l2_norms(NormGroup group, double ell) const;
  /// Annulus-restricted norms: block q uses the weight F Phi_q(r)^2
  /// (F Psi(r)^2 for q = -1 in the inhomogeneous case).
  std::vector<BlockNorms> block_norms(NormGroup group, double ell, bool homogeneous) const;
  std::vector<double> besov_norms(NormGroup group, double ell, const BesovSpec& spec) const;

  /// Tail of the t = 0 norm beyond r_max relative to the norm itself.
  double tail_fraction(NormGroup group, double ell) const;

 private:
  RadialProfile profile_;
  QuadratureOptions options_;
  QuadratureRule rule_;
  std::vector<double> times_;
  std::vector<double> data_;  // [time][node][group]
  void check_tail(NormGroup group, double ell) const;
};

/// Group magnitudes |.|^2 of a state vector at frequency r e_1.
double group_density(NormGroup group, const std::complex<double>* w);

}  // namespace epdecay
