#pragma once

#include <stdexcept>
#include <string>

namespace cavread {

// Invalid argument to a closed-form operation (negative rate, probability out of range...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Base for failures of an otherwise well-posed numerical computation.
// The CLI maps every NumericalError to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Drive too strong for the weak-drive (linear response) treatment.
class RegimeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Observed value cannot be produced by the model (e.g. below the transfer floor).
class OutOfModelError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MultipleSteadyStatesError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DimensionCapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Bad configuration file, unknown key or out-of-range value. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cavread
