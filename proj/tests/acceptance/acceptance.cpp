// Acceptance suite: one PASS/FAIL line per criterion. Runtime limits are
// part of each criterion.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "epdecay/experiments.hpp"

using namespace epdecay;

namespace {

struct Verdict {
  bool pass = false;
  std::string details;
};

std::string describe(const CheckSet& set, const std::vector<std::string>& names) {
  std::ostringstream os;
  for (const auto& n : names) {
    const Check& c = set.find(n);
    os << n << "=" << c.value << (c.pass ? "" : "[FAIL]") << " ";
  }
  return os.str();
}

bool all_named(const CheckSet& set, const std::vector<std::string>& names) {
  for (const auto& n : names)
    if (!set.find(n).pass) return false;
  return true;
}

class Runner {
 public:
  void run(const std::string& id, double limit_seconds, const std::function<Verdict()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= limit_seconds;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures_;
    std::printf("%s %s %s(%.2f s, limit %.0f s%s)\n", id.c_str(), pass ? "PASS" : "FAIL", v.details.c_str(), seconds,
                limit_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

}  // namespace

int main() {
  Runner r;

  SymbolSuiteOptions sym;
  sym.identity_samples = 1000;
  sym.energy_samples = 10000;
  sym.lyapunov_samples = 10000;
  sym.sweep_points = 200;

  r.run("AC1", 1.0, [&] {
    SymbolSuiteOptions o = sym;
    o.energy_samples = o.lyapunov_samples = 1;
    o.sweep_points = 2;
    const auto s = verify_symbols_suite(o).checks;
    return Verdict{all_named(s, {"compensator_identity"}), describe(s, {"compensator_identity"})};
  });
  r.run("AC2", 1.0, [&] {
    SymbolSuiteOptions o = sym;
    o.identity_samples = o.lyapunov_samples = 1;
    o.sweep_points = 2;
    const auto s = verify_symbols_suite(o).checks;
    return Verdict{all_named(s, {"energy_identity"}), describe(s, {"energy_identity"})};
  });
  r.run("AC3", 5.0, [&] {
    SymbolSuiteOptions o = sym;
    o.identity_samples = o.energy_samples = 1;
    o.sweep_points = 2;
    const auto s = verify_symbols_suite(o).checks;
    const std::vector<std::string> names{"lyapunov_violations", "lyapunov_worst_margin"};
    return Verdict{all_named(s, names), describe(s, names)};
  });
  r.run("AC4", 10.0, [&] {
    SymbolSuiteOptions o = sym;
    o.identity_samples = o.energy_samples = o.lyapunov_samples = 1;
    const auto res = verify_symbols_suite(o);
    const std::vector<std::string> names{"spectral_envelope", "branch_formula"};
    return Verdict{all_named(res.checks, names) && res.sweep.size() == 200,
                   describe(res.checks, names) + "points=" + std::to_string(res.sweep.size()) + " "};
  });

  LinearDecayResult linear;
  bool linear_ok = false;
  r.run("AC5", 120.0, [&] {
    LinearDecayOptions o;
    o.regime = Regime::s(1.5);
    o.ells = {0.0, 1.0};
    linear = linear_decay_experiment(o);
    linear_ok = true;
    const Regime reg = o.regime;
    const std::vector<std::string> names{theory_key(TheoryGroup::DensitiesField, 0.0, reg),
                                         theory_key(TheoryGroup::DensitiesField, 1.0, reg),
                                         theory_key(TheoryGroup::VelocitiesDifference, 0.0, reg)};
    const std::size_t nodes = QuadratureRule::composite(linear.profile.r_max, o.quadrature).size();
    return Verdict{all_named(linear.checks, names) && nodes >= 1000,
                   describe(linear.checks, names) + "nodes=" + std::to_string(nodes) + " "};
  });
  r.run("AC6", 1.0, [&] {
    if (!linear_ok) return Verdict{false, "no quadrature run "};
    const std::vector<std::string> names{"half_rate_gap:ell=0"};
    return Verdict{all_named(linear.checks, names), describe(linear.checks, names)};
  });

  r.run("AC7", 30.0, [&] {
    const auto res = difference_decay_experiment();
    std::ostringstream os;
    for (const auto& c : res.cases) os << c.name << ":rate=" << c.fit.exponent << ",R2=" << c.fit.r_squared << " ";
    return Verdict{res.checks.all_pass(), os.str()};
  });

  r.run("AC8", 1800.0, [&] {
    const auto res = simulate_experiment();
    const std::vector<std::string> names{"mass_drift", "constraint_residual", "linear_oracle", "density_slope",
                                         "energy_growth"};
    return Verdict{res.checks.all_pass(), describe(res.checks, names)};
  });

  r.run("AC9", 60.0, [&] {
    const auto res = lp_property_suite();
    std::ostringstream os;
    os << describe(res.checks, {"partition_of_unity", "embedding_chain"});
    for (const auto& [k, v] : res.constants) os << k << "=" << v << " ";
    if (!res.checks.all_pass())
      for (const auto& f : res.checks.failing()) os << "failing:" << f << " ";
    return Verdict{res.checks.all_pass(), os.str()};
  });

  r.run("AC10", 1.0, [&] {
    const auto s = theory_consistency_suite();
    return Verdict{s.all_pass(), describe(s, {"p_s_regime_agreement", "half_rate_gap"})};
  });

  std::printf("%s: %d criteria failed\n", r.failures() == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", r.failures());
  return r.failures() == 0 ? 0 : 1;
}
