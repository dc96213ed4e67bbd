#include "epdecay/radial_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "epdecay/errors.hpp"
#include "epdecay/symbolics.hpp"

namespace epdecay {

namespace {

constexpr std::size_t kGroups = 4;
constexpr double kFourPi = 4.0 * std::numbers::pi;

StateVector initial_vector(const RadialProfile& p, double r) {
  const Eigen::Vector3d xi(r, 0.0, 0.0);
  const std::complex<double> i{0.0, 1.0};
  const ComplexVector3 ue(i * r * p.phi_e(r), 0.0, 0.0);
  const ComplexVector3 ui(i * r * p.phi_i(r), 0.0, 0.0);
  return SpectralVector::constrained(xi, p.sigma_e(r), ue, p.sigma_i(r), ui).values();
}

double weight_power(double r, double ell) { return ell == 0.0 ? r * r : std::pow(r, 2.0 * ell + 2.0); }

}  // namespace

std::string to_string(NormGroup group) {
  switch (group) {
    case NormGroup::DensitiesField: return "densities_field";
    case NormGroup::Velocities: return "velocities";
    case NormGroup::DensityDifference: return "density_difference";
    case NormGroup::NonDegenerate: return "nondegenerate";
  }
  return "unknown";
}

NormGroup parse_norm_group(const std::string& text) {
  for (NormGroup g : {NormGroup::DensitiesField, NormGroup::Velocities, NormGroup::DensityDifference,
                      NormGroup::NonDegenerate})
    if (to_string(g) == text) return g;
  throw ConfigError("unknown norm group '" + text + "'");
}

double group_density(NormGroup group, const std::complex<double>* w) {
  auto sq = [&](int from, int count) {
    double s = 0.0;
    for (int j = from; j < from + count; ++j) s += std::norm(w[j]);
    return s;
  };
  const double diff = std::norm(w[SpectralVector::kSigmaE] - w[SpectralVector::kSigmaI]);
  switch (group) {
    case NormGroup::DensitiesField:
      return sq(SpectralVector::kSigmaE, 1) + sq(SpectralVector::kSigmaI, 1) + sq(SpectralVector::kE, 3);
    case NormGroup::Velocities: return sq(SpectralVector::kUe, 3) + sq(SpectralVector::kUi, 3);
    case NormGroup::DensityDifference: return diff;
    case NormGroup::NonDegenerate: return sq(SpectralVector::kUe, 3) + sq(SpectralVector::kUi, 3) + diff;
  }
  return 0.0;
}

RadialProfile RadialProfile::gaussian_mass(double mass_e, double width_e, double mass_i, double width_i,
                                           double velocity) {
  if (!(width_e > 0.0) || !(width_i > 0.0)) throw ConfigError("gaussian_mass: widths must be positive");
  RadialProfile p;
  p.name = "gaussian_mass";
  const double ae = 0.5 * width_e * width_e;
  const double ai = 0.5 * width_i * width_i;
  p.sigma_e = [=](double r) { return mass_e * std::exp(-ae * r * r); };
  p.sigma_i = [=](double r) { return mass_i * std::exp(-ai * r * r); };
  p.phi_e = [=](double r) { return velocity * std::exp(-ae * r * r); };
  p.phi_i = [=](double r) { return velocity * std::exp(-ai * r * r); };
  // exp(-w^2 r^2) < 1e-30 beyond r_max
  p.r_max = std::sqrt(70.0) / std::min(width_e, width_i);
  p.s = 1.5;
  return p;
}

RadialProfile RadialProfile::power_law(double s, double width, double velocity) {
  if (!(s > 0.0) || s > 1.5) throw ConfigError("power_law: s must lie in (0, 3/2]");
  if (!(width > 0.0)) throw ConfigError("power_law: width must be positive");
  RadialProfile p;
  p.name = "power_law";
  const double ae = 0.5 * width * width;
  const double ai = 0.5 * 1.5625 * width * width;
  const double k = s - 1.5;
  auto mono = [k](double r) { return k == 0.0 ? 1.0 : std::pow(r, k); };
  p.sigma_e = [=](double r) { return mono(r) * std::exp(-ae * r * r); };
  p.sigma_i = [=](double r) { return mono(r) * std::exp(-ai * r * r); };
  p.phi_e = [=](double r) { return velocity * mono(r) * std::exp(-ae * r * r); };
  p.phi_i = [=](double r) { return velocity * mono(r) * std::exp(-ai * r * r); };
  p.r_max = std::sqrt(70.0) / width;
  p.s = s;
  return p;
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw ConfigError("gauss_legendre: order must be positive");
  nodes.assign(static_cast<std::size_t>(order), 0.0);
  weights.assign(static_cast<std::size_t>(order), 0.0);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule QuadratureRule::composite(double r_max, const QuadratureOptions& o) {
  if (!(o.r_min > 0.0) || !(o.r_min < 1.0)) throw ConfigError("quadrature: r_min must lie in (0, 1)");
  if (!(r_max > 1.0)) throw ConfigError("quadrature: r_max must exceed 1");
  if (o.log_panels < 1 || o.uniform_panels < 1) throw ConfigError("quadrature: panel counts must be positive");
  std::vector<double> x, w;
  gauss_legendre(o.order, x, w);

  std::vector<double> edges{0.0};
  const double decades = -std::log10(o.r_min);
  for (int p = 0; p <= o.log_panels; ++p) edges.push_back(std::pow(10.0, -decades * (1.0 - double(p) / o.log_panels)));
  for (int p = 1; p <= o.uniform_panels; ++p) edges.push_back(1.0 + (r_max - 1.0) * p / o.uniform_panels);

  QuadratureRule rule;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double mid = 0.5 * (edges[e] + edges[e + 1]);
    const double half = 0.5 * (edges[e + 1] - edges[e]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      rule.nodes.push_back(mid + half * x[j]);
      rule.weights.push_back(half * w[j]);
    }
  }
  return rule;
}

RadialEvolution::RadialEvolution(const RadialProfile& profile, std::span<const double> times,
                                 const QuadratureOptions& options)
    : profile_(profile), options_(options), times_(times.begin(), times.end()) {
  if (!profile_.sigma_e || !profile_.sigma_i || !profile_.phi_e || !profile_.phi_i)
    throw ConfigError("radial profile is incomplete");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] >= 0.0)) throw ConfigError("quadrature times must be nonnegative");
    if (i > 0 && !(times_[i] > times_[i - 1])) throw ConfigError("quadrature times must be strictly increasing");
  }
  rule_ = QuadratureRule::composite(profile_.r_max, options_);

  const std::size_t nt = times_.size();
  const std::size_t nr = rule_.size();
  data_.assign(nt * nr * kGroups, 0.0);
  for (std::size_t n = 0; n < nr; ++n) {
    const double r = rule_.nodes[n];
    const Eigen::Vector3d xi(r, 0.0, 0.0);
    const StateVector w0 = initial_vector(profile_, r);
    for (std::size_t i = 0; i < nt; ++i) {
      const StateVector w = propagate(xi, w0, times_[i]);
      for (std::size_t g = 0; g < kGroups; ++g)
        data_[(i * nr + n) * kGroups + g] = group_density(static_cast<NormGroup>(g), w.data());
    }
  }
}

double RadialEvolution::density(NormGroup group, std::size_t time_index, std::size_t node) const {
  return data_[(time_index * rule_.size() + node) * kGroups + static_cast<std::size_t>(group)];
}

double RadialEvolution::tail_fraction(NormGroup group, double ell) const {
  const double r0 = profile_.r_max;
  std::vector<double> x, w;
  gauss_legendre(options_.order, x, w);
  constexpr int kPanels = 32;
  const double width = 3.0 * r0 / kPanels;
  double tail = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double a = r0 + p * width;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double r = a + 0.5 * width * (1.0 + x[j]);
      const StateVector v = initial_vector(profile_, r);
      tail += 0.5 * width * w[j] * weight_power(r, ell) * group_density(group, v.data());
    }
  }
  double total = 0.0;
  for (std::size_t n = 0; n < rule_.size(); ++n) {
    const StateVector v = initial_vector(profile_, rule_.nodes[n]);
    total += rule_.weights[n] * weight_power(rule_.nodes[n], ell) * group_density(group, v.data());
  }
  if (total == 0.0) return tail == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(tail / total);
}

void RadialEvolution::check_tail(NormGroup group, double ell) const {
  const double f = tail_fraction(group, ell);
  if (!(f <= options_.tail_tolerance))
    throw ConfigError("radial profile '" + profile_.name + "' does not decay fast enough at r_max = " +
                      std::to_string(profile_.r_max) + " for ell = " + std::to_string(ell) +
                      " (tail fraction " + std::to_string(f) + ")");
}

std::vector<double> RadialEvolution::l2_norms(NormGroup group, double ell) const {
  check_tail(group, ell);
  const std::size_t nr = rule_.size();
  std::vector<double> kernel(nr);
  for (std::size_t n = 0; n < nr; ++n) kernel[n] = kFourPi * rule_.weights[n] * weight_power(rule_.nodes[n], ell);
  std::vector<double> out(times_.size(), 0.0);
  for (std::size_t i = 0; i < times_.size(); ++i) {
    double acc = 0.0;
    for (std::size_t n = 0; n < nr; ++n) acc += kernel[n] * density(group, i, n);
    out[i] = std::sqrt(acc);
  }
  return out;
}

std::vector<BlockNorms> RadialEvolution::block_norms(NormGroup group, double ell, bool homogeneous) const {
  check_tail(group, ell);
  const std::size_t nr = rule_.size();
  const int q_lo = homogeneous ? active_blocks(rule_.nodes.front()).first : -1;
  const int q_hi = std::max(active_blocks(rule_.nodes.back()).second, q_lo);
  const std::size_t nq = static_cast<std::size_t>(q_hi - q_lo + 1);

  // Per-node multiplier weights, squared.
  std::vector<double> weights(nr * nq, 0.0);
  for (std::size_t n = 0; n < nr; ++n) {
    const double r = rule_.nodes[n];
    const double base = kFourPi * rule_.weights[n] * weight_power(r, ell);
    if (!homogeneous) {
      const double psi = low_frequency_multiplier(r);
      weights[n * nq] = base * psi * psi;
    }
    const auto [lo, hi] = active_blocks(r);
    for (int q = std::max(lo, homogeneous ? q_lo : 0); q <= hi; ++q) {
      const double phi = dyadic_multiplier(q, r);
      weights[n * nq + static_cast<std::size_t>(q - q_lo)] = base * phi * phi;
    }
  }

  std::vector<BlockNorms> out(times_.size());
  for (std::size_t i = 0; i < times_.size(); ++i) {
    out[i].first_q = q_lo;
    out[i].values.assign(nq, 0.0);
    for (std::size_t n = 0; n < nr; ++n) {
      const double g = density(group, i, n);
      if (g == 0.0) continue;
      for (std::size_t q = 0; q < nq; ++q) out[i].values[q] += weights[n * nq + q] * g;
    }
    for (double& v : out[i].values) v = std::sqrt(v);
  }
  return out;
}

std::vector<double> RadialEvolution::besov_norms(NormGroup group, double ell, const BesovSpec& spec) const {
  const std::vector<BlockNorms> blocks = block_norms(group, ell, spec.homogeneous);
  std::vector<double> out;
  out.reserve(blocks.size());
  for (const BlockNorms& b : blocks) out.push_back(combine_blocks(b, spec));
  return out;
}

}  // namespace epdecay
