#pragma once

#include <stdexcept>
#include <string>

namespace nmchaos {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or configuration constraint was violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during a simulation or estimation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class StepSizeUnderflow : public NumericalError {
 public:
  StepSizeUnderflow(double t, double h);
  double time() const { return t_; }

 private:
  double t_;
};

class NonFiniteState : public NumericalError {
 public:
  explicit NonFiniteState(double t);
  double time() const { return t_; }

 private:
  double t_;
};

class GridTooCoarse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GridMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SeriesTooShort : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateCloud : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoNeighborFound : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyWindow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nmchaos
