#pragma once

#include <stdexcept>
#include <string>

namespace tvopt {

// Base of every recoverable numeric failure raised by this library.
// Callers that want to distinguish causes catch the concrete types below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Cholesky pivot was not strictly positive: the matrix is not positive
// definite at the evaluation point (loss of strong convexity).
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// Symmetric factorization detected rank deficiency.
class Singular : public Error {
 public:
  using Error::Error;
};

// A point left the open domain of a barrier (some slack margin <= 0).
class DomainViolation : public Error {
 public:
  using Error::Error;
};

// The variable-step integrator shrank below its minimum step: the
// schedule rates are too aggressive for the configured maximum step.
class StepCollapse : public Error {
 public:
  using Error::Error;
};

// No strictly feasible point was found at the frozen time.
class InfeasibleAtTime : public Error {
 public:
  InfeasibleAtTime(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

// An iterative solver hit its iteration budget before reaching tolerance.
class MaxIterations : public Error {
 public:
  using Error::Error;
};

// An operation requiring a linear equality system was called without one.
class MissingEqualitySystem : public Error {
 public:
  using Error::Error;
};

// A log-domain fit was asked to process a value <= 0.
class NonPositiveValue : public Error {
 public:
  using Error::Error;
};

}  // namespace tvopt
