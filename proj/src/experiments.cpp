#include "epdecay/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "epdecay/errors.hpp"
#include "epdecay/lp_besov.hpp"
#include "epdecay/random.hpp"
#include "epdecay/symbolics.hpp"

namespace epdecay {

namespace {

using cd = std::complex<double>;

Check make_check(std::string name, double value, double threshold, double tolerance, std::string relation,
                 bool pass, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.threshold = threshold;
  c.tolerance = tolerance;
  c.relation = std::move(relation);
  c.pass = pass;
  c.note = std::move(note);
  return c;
}

std::string format_ell(double ell) {
  std::ostringstream os;
  os << ell;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- CheckSet

Check& CheckSet::at_most(const std::string& check, double value, double threshold, const std::string& note) {
  checks.push_back(make_check(check, value, threshold, 0.0, "<=", value <= threshold, note));
  return checks.back();
}

Check& CheckSet::at_least(const std::string& check, double value, double threshold, const std::string& note) {
  checks.push_back(make_check(check, value, threshold, 0.0, ">=", value >= threshold, note));
  return checks.back();
}

Check& CheckSet::within(const std::string& check, double value, double target, double tolerance,
                        const std::string& note) {
  checks.push_back(make_check(check, value, target, tolerance, "within", std::abs(value - target) <= tolerance, note));
  return checks.back();
}

Check& CheckSet::info(const std::string& check, double value, const std::string& note) {
  checks.push_back(make_check(check, value, 0.0, 0.0, "info", true, note));
  return checks.back();
}

void CheckSet::append(const CheckSet& other) {
  for (const Check& c : other.checks) {
    checks.push_back(c);
    if (!other.name.empty()) checks.back().name = other.name + "/" + c.name;
  }
}

bool CheckSet::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<std::string> CheckSet::failing() const {
  std::vector<std::string> out;
  for (const Check& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

const Check& CheckSet::find(const std::string& check) const {
  for (const Check& c : checks)
    if (c.name == check) return c;
  throw ReportError("no check named '" + check + "' in " + name);
}

nlohmann::json CheckSet::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const Check& c : checks) {
    nlohmann::json j{{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"pass", c.pass}};
    if (c.relation != "info") j["threshold"] = c.threshold;
    if (c.relation == "within") j["tolerance"] = c.tolerance;
    if (!c.note.empty()) j["note"] = c.note;
    list.push_back(std::move(j));
  }
  return {{"name", name}, {"checks", std::move(list)}, {"all_pass", all_pass()}, {"failing", failing()}};
}

std::string CheckSet::summary() const {
  std::ostringstream os;
  os.precision(6);
  for (const Check& c : checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value;
    if (c.relation == "within")
      os << " within " << c.tolerance << " of " << c.threshold;
    else if (c.relation != "info")
      os << ' ' << c.relation << ' ' << c.threshold;
    if (!c.note.empty()) os << "  (" << c.note << ')';
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------- symbol suite

namespace {

Eigen::Vector3d random_direction(Rng& rng) {
  Eigen::Vector3d d;
  do {
    d = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
  } while (d.norm() < 1e-8);
  return d.normalized();
}

Eigen::Vector3d random_frequency(Rng& rng, double lo, double hi) {
  return random_direction(rng) * std::pow(10.0, rng.uniform(std::log10(lo), std::log10(hi)));
}

cd random_complex(Rng& rng) { return {rng.normal(), rng.normal()}; }

ComplexVector3 random_vector3(Rng& rng) { return {random_complex(rng), random_complex(rng), random_complex(rng)}; }

SpectralVector random_constrained(Rng& rng, const Eigen::Vector3d& xi) {
  const cd se = random_complex(rng);
  const ComplexVector3 ue = random_vector3(rng);
  const cd si = random_complex(rng);
  const ComplexVector3 ui = random_vector3(rng);
  return SpectralVector::constrained(xi, se, ue, si, ui);
}

Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(m);
  Eigen::Matrix3d q = qr.householderQ();
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

StateVector rotate_state(const Eigen::Matrix3d& rot, const StateVector& w) {
  StateVector out = w;
  const Eigen::Matrix3cd r = rot.cast<cd>();
  for (int offset : {SpectralVector::kUe, SpectralVector::kUi, SpectralVector::kE})
    out.segment<3>(offset) = r * w.segment<3>(offset);
  return out;
}

// Unnormalized constraint residual |xi x E| + |i xi.E - (sigma_e - sigma_i)|.
double constraint_defect(const SpectralVector& w) {
  const Eigen::Vector3cd xi = w.xi().cast<cd>();
  const ComplexVector3 e = w.e();
  const cd div = cd(0.0, 1.0) * (xi.transpose() * e)(0);
  const cd charge = w.values()(SpectralVector::kSigmaE) - w.values()(SpectralVector::kSigmaI);
  return xi.cross(e).norm() + std::abs(div - charge);
}

// Expected real parts of the constrained parallel spectrum, sorted.
std::array<double, 4> branch_real_parts(double r) {
  const double low = sum_branch_rate(r);
  const double disc = 1.0 - 4.0 * r * r;
  const double high = disc > 0.0 ? 1.0 - low : 0.5;
  std::array<double, 4> out{low, high, difference_branch_rate(r), difference_branch_rate(r)};
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SymbolSuiteResult verify_symbols_suite(const SymbolSuiteOptions& options) {
  namespace tol = tolerances;
  SymbolSuiteResult result;
  CheckSet& checks = result.checks;
  checks.name = "verify-symbols";
  Rng rng(options.seed);

  // Compensator identity and symmetry of the building blocks.
  const FluxMatrices flux = flux_matrices();
  double sk = 0.0;
  double skew = 0.0;
  for (const Matrix8d& a : flux.a) skew = std::max(skew, (a - a.transpose()).norm());
  for (int i = 0; i < options.identity_samples; ++i) {
    const Eigen::Vector3d xi = random_frequency(rng, options.r_lo, options.r_hi);
    sk = std::max(sk, compensator_identity_residual(xi) / xi.norm());
    const CompensatorMatrix k = compensator(xi);
    skew = std::max(skew, (k + k.transpose()).norm());
  }
  checks.at_most("compensator_identity", sk, tol::kCompensatorIdentity, "max Frobenius residual / |xi|");
  checks.at_most("flux_symmetry", skew, tol::kSkewSymmetry, "A_j symmetric, K skew-symmetric");

  // Energy identity on samples with E parallel to xi.
  double energy = 0.0;
  for (int i = 0; i < options.energy_samples; ++i) {
    const Eigen::Vector3d xi = random_frequency(rng, options.r_lo, options.r_hi);
    energy = std::max(energy, std::abs(energy_identity_residual(xi, random_constrained(rng, xi).values())));
  }
  checks.at_most("energy_identity", energy, tol::kEnergyIdentity, "relative to |w||A w|, E parallel to xi");

  // Lyapunov decrement and equivalence with |w|^2.
  int violations = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  double ratio_lo = std::numeric_limits<double>::infinity();
  double ratio_hi = 0.0;
  for (int i = 0; i < options.lyapunov_samples; ++i) {
    const Eigen::Vector3d xi = random_frequency(rng, options.r_lo, options.r_hi);
    const SpectralVector w = random_constrained(rng, xi);
    const DecrementCheck d = lyapunov_decrement_check(w, options.kappa);
    if (!d.pass) ++violations;
    const double norm2 = w.values().squaredNorm();
    worst_margin = std::max(worst_margin, (d.decrement + d.dissipation) / norm2);
    const double ratio = lyapunov(xi, w.values(), options.kappa) / norm2;
    ratio_lo = std::min(ratio_lo, ratio);
    ratio_hi = std::max(ratio_hi, ratio);
  }
  checks.at_most("lyapunov_violations", violations, 0.0, "samples with dL/dt + dissipation > slack |w|^2");
  checks.info("lyapunov_worst_margin", worst_margin, "max (dL/dt + dissipation) / |w|^2");
  checks.at_least("lyapunov_lower_equivalence", ratio_lo, 0.25, "min L / |w|^2");
  checks.at_most("lyapunov_upper_equivalence", ratio_hi, 0.75, "max L / |w|^2");

  // Spectral sweep: envelope and branch formulas.
  double envelope = std::numeric_limits<double>::infinity();
  double branch = 0.0;
  int skipped = 0;
  const int n = std::max(options.sweep_points, 2);
  const double a = std::log10(options.r_lo);
  const double b = std::log10(options.r_hi);
  for (int i = 0; i < n; ++i) {
    const double r = std::pow(10.0, a + (b - a) * i / (n - 1));
    const double rate = constrained_decay_exponent(r);
    const double eta = dissipation_profile(r);
    result.sweep.push_back({r, rate, eta});
    envelope = std::min(envelope, rate / eta);
    // The sum branch has a double root at r = 1/2, where eigenvalues are
    // only accurate to sqrt(machine epsilon).
    if (std::abs(1.0 - 4.0 * r * r) < 1e-4) {
      ++skipped;
      continue;
    }
    const auto eig = constrained_parallel_eigenvalues(r);
    const auto expected = branch_real_parts(r);
    for (std::size_t j = 0; j < 4; ++j) branch = std::max(branch, std::abs(eig[j].real() - expected[j]));
    branch = std::max(branch, std::abs(rate - std::min({sum_branch_rate(r), difference_branch_rate(r), 1.0})));
  }
  checks.at_least("spectral_envelope", envelope, tol::kSpectralEnvelope, "min exponent / (r^2/(1+r^2))");
  checks.at_most("branch_formula", branch, tol::kBranchFormula,
                 "sum (1-sqrt(1-4r^2))/2 and difference 1/2; " + std::to_string(skipped) + " points at the double root skipped");

  // Semigroup bound |exp(-A t)| <= C exp(-c eta t) on the constraint subspace.
  double constant = 0.0;
  for (int i = 0; i < n; i += 5) {
    const double r = result.sweep[static_cast<std::size_t>(i)][0];
    const double eta = dissipation_profile(r);
    for (int j = 0; j <= 60; ++j) {
      // 0.3 eta t log-spaced over [1e-3, 20], plus t = 0
      const double exponent = j == 0 ? 0.0 : 1e-3 * std::pow(2e4, (j - 1) / 59.0);
      const double t = exponent / (tol::kSemigroupRate * eta);
      constant = std::max(constant, constrained_propagator_norm(r, t) * std::exp(exponent));
    }
  }
  checks.at_most("semigroup_constant", constant, tol::kSemigroupConstant,
                 "max |exp(-A t)| exp(0.3 eta t) over 0.3 eta t <= 20");

  // Rotational covariance, constraint preservation, monotone modified energy.
  double covariance = 0.0;
  double preservation = 0.0;
  int increases = 0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d xi = random_frequency(rng, 1e-2, 1e2);
    const SpectralVector w = random_constrained(rng, xi);
    const double t = rng.uniform(0.0, 5.0);
    const double scale = xi.norm() * w.e().norm() + std::abs(w.values()(0)) + std::abs(w.values()(4));
    const Eigen::Matrix3d rot = random_rotation(rng);
    const StateVector lhs = propagate(rot * xi, rotate_state(rot, w.values()), t);
    const StateVector rhs = rotate_state(rot, propagate(xi, w.values(), t));
    covariance = std::max(covariance, (lhs - rhs).norm() / w.values().norm());
    for (double s : {0.5, 5.0, 50.0}) preservation = std::max(preservation, constraint_defect(propagate(w, s)) / scale);
    double previous = lyapunov(xi, w.values(), options.kappa);
    for (int k = 1; k <= 20; ++k) {
      const double current = lyapunov(xi, propagate(xi, w.values(), 0.25 * k), options.kappa);
      if (current > previous * (1.0 + 1e-12)) ++increases;
      previous = current;
    }
  }
  checks.at_most("rotational_covariance", covariance, tol::kRotationalCovariance);
  checks.at_most("constraint_preservation", preservation, tol::kConstraint, "residual at t relative to the initial data");
  checks.at_most("modified_energy_increases", increases, 0.0, "steps where the Lyapunov functional grows");
  return result;
}

// -------------------------------------------------------------- LP suite

namespace {

// Consistent half spectrum of a real field (round trip through real space).
SpectralField realize(SpectralTransform& fft, const SpectralField& c) {
  RealField f = fft.inverse(c);
  return fft.forward(f);
}

// Zero-mean field with random phases and spectrum |k|^{-beta} exp(-|k|^2/(2 k0^2)).
SpectralField random_spectrum(SpectralTransform& fft, Rng& rng) {
  const Grid& grid = fft.grid();
  const double beta = rng.uniform(0.0, 3.0);
  const double k0 = std::exp2(rng.uniform(-1.0, 3.0));
  SpectralField c(grid.spectral_size(), Complex{});
  for (std::size_t k = 1; k < c.size(); ++k) {
    const cd z = random_complex(rng);
    if (grid.is_nyquist(k)) continue;
    const double r = grid.wavenumber(k);
    c[k] = z * std::pow(r, -beta) * std::exp(-r * r / (2.0 * k0 * k0));
  }
  SpectralField h = realize(fft, c);
  h[0] = 0.0;
  return h;
}

// Random coefficients restricted to lo <= |k| <= hi.
SpectralField random_band(SpectralTransform& fft, Rng& rng, double lo, double hi) {
  const Grid& grid = fft.grid();
  SpectralField c(grid.spectral_size(), Complex{});
  for (std::size_t k = 1; k < c.size(); ++k) {
    const cd z = random_complex(rng);
    const double r = grid.wavenumber(k);
    if (!grid.is_nyquist(k) && r >= lo && r <= hi) c[k] = z;
  }
  return realize(fft, c);
}

// Signed sum of a few Gaussian bumps, mean removed.
RealField random_bumps(SpectralTransform& fft, Rng& rng) {
  const Grid& grid = fft.grid();
  const double length = grid.length();
  const int count = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
  RealField f(grid.real_size(), 0.0);
  for (int b = 0; b < count; ++b) {
    Vec3 centre{};
    for (int d = 0; d < grid.dim(); ++d) centre[static_cast<std::size_t>(d)] = rng.uniform(0.0, length);
    const double width = rng.uniform(0.08, 0.2) * length;
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Vec3 x = grid.position(i);
      double r2 = 0.0;
      for (int d = 0; d < grid.dim(); ++d) {
        double dx = std::abs(x[static_cast<std::size_t>(d)] - centre[static_cast<std::size_t>(d)]);
        dx = std::min(dx, length - dx);
        r2 += dx * dx;
      }
      f[i] += sign * std::exp(-r2 / (2.0 * width * width));
    }
  }
  SpectralField c = fft.forward(f);
  c[0] = 0.0;
  return fft.inverse(c);
}

double hom(const DyadicPartition& p, const SpectralField& f, double s, SumIndex r) {
  return besov_norm(p, f, BesovSpec{s, r, true});
}

double lambda_norm(const Grid& grid, const SpectralField& f, double alpha) {
  const std::span<const Complex> one[1] = {f};
  return derivative_l2_norm(grid, one, alpha);
}

struct Interpolation {
  double k;
  double m;
  double rho;
};

}  // namespace

LpSuiteResult lp_property_suite(const LpSuiteOptions& options) {
  namespace tol = tolerances;
  LpSuiteResult result;
  CheckSet& checks = result.checks;
  checks.name = "lp-test";
  Rng rng(options.seed);
  const Grid grid(options.dim, options.points, options.length);
  SpectralTransform fft(grid);
  const DyadicPartition partition = DyadicPartition::covering(grid);

  // Partition of unity (continuous and sampled on the grid) and support.
  double unity = 0.0;
  int support = 0;
  for (int i = 0; i <= 2000; ++i) {
    const double r = std::pow(10.0, -3.0 + 6.0 * i / 2000.0);
    const auto [lo, hi] = active_blocks(r);
    double hom_sum = 0.0;
    double inhom_sum = low_frequency_multiplier(r);
    for (int q = lo; q <= hi; ++q) {
      hom_sum += dyadic_multiplier(q, r);
      if (q >= 0) inhom_sum += dyadic_multiplier(q, r);
    }
    unity = std::max({unity, std::abs(hom_sum - 1.0), std::abs(inhom_sum - 1.0)});
    for (int q = -12; q <= 12; ++q) {
      const double lo_edge = 0.75 * std::exp2(q);
      const double hi_edge = 8.0 / 3.0 * std::exp2(q);
      if (dyadic_multiplier(q, r) > 0.0 && (r < lo_edge || r > hi_edge)) ++support;
    }
  }
  for (std::size_t k = 1; k < grid.spectral_size(); ++k) {
    const auto& w = partition.weights(k);
    unity = std::max(unity, std::abs(w[0] + w[1] - 1.0));
  }
  checks.at_most("partition_of_unity", unity, tol::kPartitionOfUnity);
  checks.at_most("dyadic_support", support, 0.0, "samples with Phi_q > 0 outside 2^q [3/4, 8/3]");

  // Reconstruction: sum of blocks recovers the field.
  double reconstruction = 0.0;
  for (int i = 0; i < 5; ++i) {
    SpectralField f = random_spectrum(fft, rng);
    f[0] = 1.0;  // the inhomogeneous decomposition keeps the mean
    SpectralField hom_sum(f.size(), Complex{});
    SpectralField inhom_sum(f.size(), Complex{});
    for (int q = partition.q_min(); q <= partition.q_max(); ++q) {
      const SpectralField b = dyadic_block(partition, f, q, true);
      for (std::size_t k = 0; k < f.size(); ++k) hom_sum[k] += b[k];
    }
    for (int q = -1; q <= partition.q_max(); ++q) {
      const SpectralField b = dyadic_block(partition, f, q, false);
      for (std::size_t k = 0; k < f.size(); ++k) inhom_sum[k] += b[k];
    }
    hom_sum[0] = f[0];  // homogeneous blocks omit the mean by construction
    double num = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
      num = std::max({num, std::abs(hom_sum[k] - f[k]), std::abs(inhom_sum[k] - f[k])});
    double den = 0.0;
    for (const Complex& v : f) den = std::max(den, std::abs(v));
    reconstruction = std::max(reconstruction, num / den);
  }
  checks.at_most("reconstruction", reconstruction, tol::kPartitionOfUnity, "sum of blocks vs field, max coefficient");

  // Bernstein bounds on annulus- and ball-limited samples.
  const int q_lo = static_cast<int>(std::ceil(std::log2(grid.fundamental() / 0.75)));
  const int q_hi = static_cast<int>(std::floor(std::log2(grid.dealiased_max_wavenumber() / (8.0 / 3.0))));
  for (double alpha : {-1.0, 0.5, 1.0, 2.0}) {
    const double c1 = std::pow(0.75, alpha);
    const double c2 = std::pow(8.0 / 3.0, alpha);
    const double lower = std::min(c1, c2);
    const double upper = std::max(c1, c2);
    double worst = 0.0;
    double ball = 0.0;
    for (int i = 0; i < options.samples; ++i) {
      const int q = q_lo + static_cast<int>(rng.uniform(0.0, q_hi - q_lo + 1.0));
      const double lambda = std::exp2(q);
      const SpectralField f = random_band(fft, rng, 0.75 * lambda, 8.0 / 3.0 * lambda);
      const double ratio = lambda_norm(grid, f, alpha) / (std::pow(lambda, alpha) * lambda_norm(grid, f, 0.0));
      worst = std::max({worst, lower / ratio, ratio / upper});
      if (alpha > 0.0) {
        const SpectralField g = random_band(fft, rng, 0.0, 2.0 * lambda);
        ball = std::max(ball, lambda_norm(grid, g, alpha) / (std::pow(2.0 * lambda, alpha) * lambda_norm(grid, g, 0.0)));
      }
    }
    checks.at_most("bernstein_annulus:alpha=" + format_ell(alpha), worst, 1.0 + 1e-12,
                   "max of bound / ratio over samples");
    if (alpha > 0.0)
      checks.at_most("bernstein_ball:alpha=" + format_ell(alpha), ball, 1.0 + 1e-12,
                     "|Lambda^alpha f| / ((lambda R)^alpha |f|)");
  }

  // Embedding chain and Lambda-equivalence.
  double chain = 0.0;
  double equivalence_lo = std::numeric_limits<double>::infinity();
  double equivalence_hi = 0.0;
  double equivalence_worst = 0.0;
  for (int i = 0; i < options.samples; ++i) {
    const SpectralField f = random_spectrum(fft, rng);
    const double l2 = l2_norm(grid, f, true);
    const double b1 = hom(partition, f, 0.0, SumIndex::One);
    const double binf = hom(partition, f, 0.0, SumIndex::Infinity);
    const double inhom = besov_norm(partition, f, BesovSpec{0.0, SumIndex::One, false});
    chain = std::max({chain, (binf - l2) / l2, (l2 - b1) / l2, (inhom - b1) / l2});
    const double alpha = i % 2 == 0 ? 0.5 : 1.0;
    const std::span<const Complex> one[1] = {f};
    const double ratio =
        besov_norm(partition, one, BesovSpec{0.5, SumIndex::One, true}, alpha) / hom(partition, f, 0.5 + alpha, SumIndex::One);
    equivalence_lo = std::min(equivalence_lo, ratio);
    equivalence_hi = std::max(equivalence_hi, ratio);
    equivalence_worst = std::max({equivalence_worst, std::pow(0.75, alpha) / ratio, ratio / std::pow(8.0 / 3.0, alpha)});
  }
  checks.at_most("embedding_chain", chain, tol::kEmbeddingSlack,
                 "hom B^0_{2,inf} <= L^2 <= hom B^0_{2,1}, B^0_{2,1} <= hom B^0_{2,1}");
  checks.at_most("lambda_equivalence", equivalence_worst, 1.0 + 1e-12,
                 "|Lambda^a f|_{B^s} / |f|_{B^{s+a}} in [(3/4)^a, (8/3)^a]; observed [" + std::to_string(equivalence_lo) +
                     ", " + std::to_string(equivalence_hi) + "]");

  // Interpolation inequalities: the fitted constant is the largest ratio.
  const Interpolation params[] = {{0.0, 1.0, 1.5}, {0.5, 1.0, 1.0}, {1.0, 0.5, 1.5}, {0.5, 1.5, 1.0}};
  double c_besov = 0.0;
  double c_sobolev = 0.0;
  double c_pair = 0.0;
  double c_gn = 0.0;
  double c_l1 = 0.0;
  for (int i = 0; i < options.samples; ++i) {
    const Interpolation& p = params[i % 4];
    const SpectralField f = random_spectrum(fft, rng);
    const double theta = (p.rho + p.k) / (p.rho + p.k + p.m);
    const double neg = hom(partition, f, -p.rho, SumIndex::Infinity);
    c_besov = std::max(c_besov, hom(partition, f, p.k, SumIndex::One) /
                            (std::pow(hom(partition, f, p.k + p.m, SumIndex::Infinity), theta) *
                             std::pow(neg, 1.0 - theta)));
    c_sobolev = std::max(c_sobolev, lambda_norm(grid, f, p.k) /
                            (std::pow(lambda_norm(grid, f, p.k + p.m), theta) * std::pow(neg, 1.0 - theta)));
    // k = m (1 - theta) + rho theta with (m, rho) = (k - m, k + m): theta = 1/2.
    const double lo = p.k - p.m;
    const double hi = p.k + p.m;
    c_pair = std::max(c_pair, hom(partition, f, p.k, SumIndex::One) /
                            std::sqrt(hom(partition, f, lo, SumIndex::Infinity) * hom(partition, f, hi, SumIndex::Infinity)));
    c_gn = std::max(c_gn, lambda_norm(grid, f, p.k) / std::sqrt(lambda_norm(grid, f, lo) * lambda_norm(grid, f, hi)));
    const RealField g = random_bumps(fft, rng);
    const SpectralField gh = fft.forward(g);
    c_l1 = std::max(c_l1, hom(partition, gh, -0.5 * grid.dim(), SumIndex::Infinity) / l1_norm(grid, g));
  }
  result.constants = {{"interpolation_besov", c_besov},
                      {"interpolation_sobolev", c_sobolev},
                      {"interpolation_besov_pair", c_pair},
                      {"interpolation_gagliardo_nirenberg", c_gn},
                      {"l1_embedding", c_l1}};
  const double cmax = tol::kInterpolationConstant;
  checks.at_most("interpolation_besov", c_besov, cmax, "|f|_{B^k_{2,1}} <= C |f|_{B^{k+m}_{2,inf}}^theta |f|_{B^{-rho}_{2,inf}}^{1-theta}");
  checks.at_most("interpolation_sobolev", c_sobolev, cmax, "|Lambda^k f| <= C |Lambda^{k+m} f|^theta |f|_{B^{-rho}_{2,inf}}^{1-theta}");
  checks.at_most("interpolation_besov_pair", c_pair, cmax, "|f|_{B^k_{2,1}} <= C |f|_{B^{k-m}_{2,inf}}^{1/2} |f|_{B^{k+m}_{2,inf}}^{1/2}");
  checks.at_most("interpolation_gagliardo_nirenberg", c_gn, cmax, "|Lambda^k f| <= C |Lambda^{k-m} f|^{1/2} |Lambda^{k+m} f|^{1/2}");
  checks.at_most("l1_embedding", c_l1, cmax, "|f|_{B^{-n/2}_{2,inf}} <= C |f|_{L^1}");
  return result;
}

// ------------------------------------------------------ theory consistency

CheckSet theory_consistency_suite() {
  CheckSet checks;
  checks.name = "theory-table";
  const double s_c = kCriticalRegularity;
  double regime_gap = 0.0;
  double half_gap = 0.0;
  for (double p : {1.0, 1.1, 1.25, 4.0 / 3.0, 1.5, 1.75, 1.9}) {
    const Regime rp = Regime::p(p);
    const Regime rs = Regime::s(rp.equivalent_s());
    for (double ell = 0.0; ell <= s_c - 1.0 + 1e-12; ell += 0.25) {
      regime_gap = std::max(regime_gap, std::abs(theory_exponent(TheoryGroup::DensitiesField, ell, rp) -
                                                 theory_exponent(TheoryGroup::DensitiesField, ell, rs)));
      regime_gap = std::max(regime_gap, std::abs(theory_exponent(TheoryGroup::VelocitiesDifference, ell, rp, true) -
                                                 theory_exponent(TheoryGroup::VelocitiesDifference, ell, rs, true)));
      for (const Regime& r : {rp, rs}) {
        const double gap = theory_exponent(TheoryGroup::VelocitiesDifference, ell, r, true) -
                           theory_exponent(TheoryGroup::DensitiesField, ell, r);
        half_gap = std::max(half_gap, std::abs(gap + 0.5));
      }
    }
  }
  checks.at_most("p_s_regime_agreement", regime_gap, 1e-15, "p regime vs s = 3(1/p - 1/2) regime");
  checks.at_most("half_rate_gap", half_gap, 1e-15, "velocity minus density exponent + 1/2");
  checks.within("densities:ell=0:p=1", theory_exponent(TheoryGroup::DensitiesField, 0.0, Regime::p(1.0)), -0.75, 1e-15);
  checks.within("velocities:ell=0:p=1", theory_exponent(TheoryGroup::VelocitiesDifference, 0.0, Regime::p(1.0)), -1.25,
                1e-15);
  checks.within("densities:ell=1:s=1.5", theory_exponent(TheoryGroup::DensitiesField, 1.0, Regime::s(1.5)), -1.25,
                1e-15);
  return checks;
}

// ------------------------------------------------------------ linear decay

RadialProfile regime_profile(const Regime& regime) {
  const double s = regime.equivalent_s();
  if (std::abs(s - 1.5) < 1e-12) return RadialProfile::gaussian_mass();
  return RadialProfile::power_law(s);
}

NormGroup measured_group(TheoryGroup group) {
  return group == TheoryGroup::DensitiesField ? NormGroup::DensitiesField : NormGroup::NonDegenerate;
}

std::vector<double> log_times(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0.0) || !(t_max > t_min) || per_decade < 1) throw ConfigError("log_times: need 0 < t_min < t_max");
  const int count = static_cast<int>(std::lround(std::log10(t_max / t_min) * per_decade));
  std::vector<double> t{0.0};
  for (int i = 0; i <= count; ++i) t.push_back(t_min * std::pow(10.0, static_cast<double>(i) / per_decade));
  return t;
}

LinearDecayResult linear_decay_experiment(const LinearDecayOptions& options) {
  if (options.ells.empty() || options.groups.empty()) throw ConfigError("linear-decay: empty ell or group list");
  LinearDecayResult result;
  result.profile = regime_profile(options.regime);
  const std::vector<double> times = log_times(options.t_min, options.t_max, options.per_decade);
  const RadialEvolution evolution(result.profile, times, options.quadrature);

  const TheoryTable base = theory_table(options.groups, options.ells, options.regime, true);
  for (TheoryGroup group : options.groups) {
    for (double ell : options.ells) {
      const std::string key = theory_key(group, ell, options.regime);
      NormSeries series = norm_series(evolution, measured_group(group), ell);
      result.fits[key] = fit_decay(series, FitModel::Power, options.window);
      result.table[key] = base.at(key);
      result.series.push_back(std::move(series));
      if (options.besov) {
        const double offset = group == TheoryGroup::DensitiesField ? 1.0 : 2.0;
        const BesovSpec spec{kCriticalRegularity - offset - ell, SumIndex::One, false};
        NormSeries b = norm_series(evolution, measured_group(group), ell, spec);
        result.fits["besov:" + key] = fit_decay(b, FitModel::Power, options.window);
        result.table["besov:" + key] = base.at(key);
        result.series.push_back(std::move(b));
      }
    }
  }
  result.report = compile_report(result.fits, result.table, options.tolerance);

  CheckSet& checks = result.checks;
  checks.name = "linear-decay";
  for (const ReportEntry& e : result.report.entries)
    checks.within(e.key, e.fitted, e.predicted, e.tolerance, "power-law fit over [" + format_ell(e.window.t0) + ", " +
                                                               format_ell(e.window.t1) + "]");
  const bool both = std::count(options.groups.begin(), options.groups.end(), TheoryGroup::DensitiesField) > 0 &&
                    std::count(options.groups.begin(), options.groups.end(), TheoryGroup::VelocitiesDifference) > 0;
  if (both) {
    for (double ell : options.ells) {
      const double dens = result.fits.at(theory_key(TheoryGroup::DensitiesField, ell, options.regime)).exponent;
      const double vel = result.fits.at(theory_key(TheoryGroup::VelocitiesDifference, ell, options.regime)).exponent;
      checks.within("half_rate_gap:ell=" + format_ell(ell), vel - dens, -0.5, options.gap_tolerance,
                    "velocity-group minus density-group exponent");
    }
  }
  return result;
}

// -------------------------------------------------------- difference decay

namespace {

NormSeries difference_series(const Trajectory& trajectory) {
  NormSeries s;
  s.quantity = "l2:difference_system";
  s.group = NormGroup::DensityDifference;
  s.provenance = Provenance::GridSolver;
  // The plasma-oscillation branch has a uniform gap; the box cutoff does
  // not affect exponential decay, so no crossover cap applies.
  s.crossover = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    s.times.push_back(trajectory.times[i]);
    s.values.push_back(std::sqrt(2.0 * trajectory.diagnostics[i].difference_energy));
  }
  return s;
}

}  // namespace

DifferenceDecayResult difference_decay_experiment(const DifferenceDecayOptions& options) {
  SolverConfig config;
  config.grid = Grid(options.dim, options.points, options.length);
  config.mode = SolverMode::LinearDifference;
  config.dt = options.dt;
  config.final_time = options.final_time;
  config.snapshot_interval = options.snapshot_interval;
  config.initial.amplitude = options.amplitude;
  config.initial.seed = options.seed;

  DifferenceDecayResult result;
  result.checks.name = "difference-decay";
  std::array<Complex, 8> coefficients{};
  coefficients[SpectralState::kSigmaE] = options.amplitude;
  const SpectralState single = single_mode_state(config.grid, options.mode, coefficients);
  result.cases.push_back({"single_mode", run_difference_linear(config, single), {}, {}});
  config.initial.kind = InitialKind::RandomBand;
  result.cases.push_back({"broadband", run_difference_linear(config), {}, {}});

  for (DifferenceCase& c : result.cases) {
    c.series = difference_series(c.trajectory);
    c.fit = fit_decay(c.series, FitModel::Exponential, options.window);
    double growth = 0.0;
    const auto& d = c.trajectory.diagnostics;
    for (std::size_t i = 1; i < d.size(); ++i)
      growth = std::max(growth, (d[i].difference_energy - d[i - 1].difference_energy) / d[0].difference_energy);
    result.checks.at_least(c.name + ":rate", c.fit.exponent, options.min_rate, "analytic rate 1/2");
    result.checks.at_least(c.name + ":r_squared", c.fit.r_squared, options.min_r_squared);
    result.checks.at_most(c.name + ":energy_growth", growth, 1e-12, "max step increase / initial energy");
  }
  return result;
}

// ---------------------------------------------------------------- simulate

SolverConfig default_simulation_config() {
  SolverConfig c;
  c.grid = Grid(3, 48, 64.0);
  c.mode = SolverMode::Nonlinear;
  c.dt = 0.08;
  c.final_time = 40.0;
  c.snapshot_interval = 2.5;
  c.initial = InitialData{InitialKind::GaussianMass, 1e-2, 1.0, 1};
  return c;
}

SolverConfig default_linear_check_config() {
  SolverConfig c = default_simulation_config();
  c.mode = SolverMode::LinearFull;
  c.dt = 0.01;
  c.final_time = 10.0;
  // Mass scaled with the amplitude keeps the bump width (and its fit in the box).
  c.initial = InitialData{InitialKind::GaussianMass, 1e-4, 1e-2, 1};
  return c;
}

double linear_oracle_error(const Trajectory& trajectory) {
  if (trajectory.config.mode != SolverMode::LinearFull)
    throw PreconditionError("linear_oracle_error: trajectory is not linear_full");
  const Grid& grid = trajectory.grid();
  const std::size_t n = grid.spectral_size();
  std::vector<std::size_t> modes;
  std::vector<StateVector> initial;
  for (std::size_t k = 1; k < n; ++k) {
    if (grid.is_nyquist(k)) continue;
    const auto v = mode_vector(grid, trajectory.states.front(), k);
    StateVector w = Eigen::Map<const StateVector>(v.data());
    if (w.squaredNorm() == 0.0) continue;
    modes.push_back(k);
    initial.push_back(w);
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    double deviation = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const Vec3& kv = grid.wavevector(modes[j]);
      const StateVector exact = propagate(Eigen::Vector3d(kv[0], kv[1], kv[2]), initial[j], trajectory.times[i]);
      const auto v = mode_vector(grid, trajectory.states[i], modes[j]);
      const StateVector numeric = Eigen::Map<const StateVector>(v.data());
      deviation = std::max(deviation, (numeric - exact).norm());
      scale = std::max(scale, exact.norm());
    }
    if (scale > 0.0) worst = std::max(worst, deviation / scale);
  }
  return worst;
}

SimulateResult simulate_experiment(const SimulateOptions& options) {
  namespace tol = tolerances;
  SimulateResult result;
  CheckSet& checks = result.checks;
  checks.name = "simulate";
  result.trajectory = run(options.solver);
  const Trajectory& traj = result.trajectory;

  checks.at_most("mass_drift", traj.max_mass_drift(), tol::kMassDrift, "relative, both species");
  checks.at_most("constraint_residual", traj.max_constraint_residual(), tol::kConstraintResidual,
                 "|div E - (sigma_e - sigma_i)|_{L^2}, all snapshots");
  double curl = 0.0;
  double min_density = std::numeric_limits<double>::infinity();
  for (const SnapshotDiagnostics& d : traj.diagnostics) {
    curl = std::max(curl, d.curl_residual);
    min_density = std::min(min_density, d.min_density);
  }
  checks.at_most("curl_residual", curl, tol::kIrrotationality, "|curl E| / |E|");
  checks.info("min_density", min_density);

  std::vector<double> ells{0.0};
  for (double ell : options.ells)
    if (ell != 0.0) ells.push_back(ell);
  for (double ell : ells)
    for (NormGroup g : {NormGroup::DensitiesField, NormGroup::Velocities, NormGroup::NonDegenerate})
      result.series.push_back(norm_series(traj, g, ell));
  const double crossover = traj.grid().crossover_time();
  const FitWindow window = options.window.value_or(default_window(Provenance::GridSolver, crossover));
  try {
    // The first series is the densities-and-field group at ell = 0.
    result.density_fit = fit_decay(result.series.front(), FitModel::Power, window);
    checks.within("density_slope", result.density_fit->exponent, options.target_slope, options.slope_tolerance,
                  "corroborative; window [" + format_ell(window.t0) + ", " + format_ell(window.t1) +
                      "] capped by crossover " + format_ell(crossover));
  } catch (const FitError& e) {
    checks.checks.push_back(make_check("density_slope", std::nan(""), options.target_slope, options.slope_tolerance,
                                       "within", false, e.what()));
  }

  result.energy = energy_functionals(traj, options.s);
  const auto& times = result.energy.times;
  const auto ref = std::lower_bound(times.begin(), times.end(), options.energy_reference_time - 1e-9);
  if (ref == times.end()) {
    checks.checks.push_back(make_check("energy_growth", std::nan(""), options.energy_growth, 0.0, "<=", false,
                                       "run ends before the reference time"));
  } else {
    const double e_ref = result.energy.e[static_cast<std::size_t>(ref - times.begin())];
    const double e_end = result.energy.e.back();
    checks.at_most("energy_growth", e_ref > 0.0 ? e_end / e_ref : 0.0, options.energy_growth,
                   "E(T) / E(" + format_ell(*ref) + ")");
    if (result.energy.m0 > 0.0) checks.info("energy_over_m0", e_end / result.energy.m0, "fitted C in E(T) <= C M0");
  }

  if (options.linear_check) {
    SolverConfig linear = options.linear;
    linear.mode = SolverMode::LinearFull;
    result.linear_error = linear_oracle_error(run(linear));
    checks.at_most("linear_oracle", *result.linear_error, tol::kLinearModeAgreement,
                   "linear_full vs matrix exponential, max mode deviation / max mode");
  }
  return result;
}

}  // namespace epdecay
