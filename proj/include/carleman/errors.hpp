#pragma once

#include <stdexcept>
#include <string>

namespace carleman {

// Base of every error raised by the library. The CLI maps the concrete
// subclass onto an exit code: configuration 2, numerical 3, assumption 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Operands live on different grids or boundaries.
class GridMismatchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PreconditionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The requested check does not apply to the given data (e.g. x1-dependent
// fields passed to the x2-only reduced conditions).
class NotApplicableError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// A hypothesis on the data (weights, q-tilde lower bounds, vanishing traces) does
// not hold.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// |q~|, |g| or another chain divisor fell below the guard threshold.
class DivisorGuardError : public AssumptionError {
 public:
  using AssumptionError::AssumptionError;
};

class FixtureNotAnalyticError : public Error {
 public:
  using Error::Error;
};

}  // namespace carleman
