#pragma once
#include <stdexcept>

namespace hlab {

// Invalid parameters or inputs outside an operation's domain.
// The command line tool maps these to exit code 2.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A hypothesis required by the theory does not hold for the given parameters
// (e.g. alpha*p <= n where a supercritical regime is required).
class RegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// An input fails a structural precondition (e.g. a cube family that is
// claimed regular but violates the packing inequality).
class PreconditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Numerical failure: non-convergent quadrature, unusable fit scales,
// precision exhausted. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A requested quantity is infinite for the given input
// (e.g. the Choquet norm of a point mass).
class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hlab
