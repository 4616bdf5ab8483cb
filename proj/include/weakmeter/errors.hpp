#pragma once

#include <stdexcept>
#include <string>

namespace weakmeter {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: wrong dimension, non-Hermitian matrix, non-unit vector,
// nonpositive scale.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Probe density matrix would not be positive semidefinite (coherence scale
// larger than the spread).
class InvalidProbeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Scenario configuration problem: unknown or missing key, unparsable value,
// domain violation. The CLI maps these to exit code 1.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Physics-domain failures. The CLI maps all of these to exit code 2.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Postselected state orthogonal to the preselected one: the weak value is
// undefined.
class OrthogonalPostselectionError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Probability of the postselection outcome is numerically zero.
class VanishingPostselectionError : public DomainError {
 public:
  VanishingPostselectionError(const std::string& what, double probability)
      : DomainError(what), probability_(probability) {}
  double probability() const noexcept { return probability_; }

 private:
  double probability_;
};

// Spin geometry where the observable is parallel to the preselection axis.
class DegenerateGeometryError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A closed form was requested outside the parameter regime it is derived in.
class RegimeNotApplicableError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Internal consistency check failed (imaginary residue, negative density).
class NumericAssertionError : public Error {
 public:
  using Error::Error;
};

}  // namespace weakmeter
