#pragma once

#include <stdexcept>
#include <string>

namespace epdecay {

/// Input outside the mathematical domain of an operation (non-physical
/// density, zero frequency, negative-order derivative of a field with mean).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid grid, partition, quadrature or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid command-line or configuration-file input; the message names the
/// offending key.
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A documented precondition of an operation does not hold for its input.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Initial data too large for the density positivity constraint.
class AmplitudeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Time integration produced NaN or lost density positivity.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time, int stage)
      : std::runtime_error(what), time_(time), stage_(stage) {}

  double time() const noexcept { return time_; }
  int stage() const noexcept { return stage_; }

 private:
  double time_;
  int stage_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace epdecay
