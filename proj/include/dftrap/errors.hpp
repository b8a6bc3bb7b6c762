#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dftrap {

/// Input outside the domain of a formula (zero frequency, zero radius, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bisection bracket does not contain a verdict change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two point charges closer than the hard-core radius.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrator step too coarse for the active drive.
class StepSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Record too short for the requested spectral estimate.
class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent configuration (bad units, missing particle, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solve inside a batch failed; carries the index of the failing input.
class BatchError : public std::runtime_error {
 public:
  BatchError(std::size_t index, const std::string& what)
      : std::runtime_error("input #" + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace dftrap
