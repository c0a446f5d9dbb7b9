#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tvopt/dense.hpp"

namespace tvopt {

// A scalar function of (point, time) carrying the four derivatives the
// tracking dynamics need: spatial gradient and Hessian, the time
// derivative of the gradient, and the time derivative of the value.
// Evaluators must be finite for every finite x and t >= 0; functions used
// as barrier constraints stay finite even where they are violated.
struct TimeVaryingScalarField {
  std::size_t dimension = 0;
  std::function<double(const Vec&, double)> value;
  std::function<Vec(const Vec&, double)> gradient;
  std::function<Matrix(const Vec&, double)> hessian;
  std::function<Vec(const Vec&, double)> time_cross;       // d/dt of gradient
  std::function<double(const Vec&, double)> time_partial;  // d/dt of value
};

// Time-varying linear system A(t) x = b(t) with its rates of change.
// A(t) must keep full row rank p < n over the queried horizon.
struct EqualitySystem {
  std::size_t count = 0;  // rows p
  std::function<Matrix(double)> matrix;
  std::function<Vec(double)> offset;
  std::function<Matrix(double)> matrix_rate;
  std::function<Vec(double)> offset_rate;
};

// One objective plus inequality constraints (and optionally a linear
// equality system), all sharing the same dimension. strong_convexity is
// the declared curvature lower bound m; it is a modeling input and is
// never estimated here.
struct TrackingProblem {
  TimeVaryingScalarField objective;
  std::vector<TimeVaryingScalarField> constraints;
  double strong_convexity = 1.0;
  std::optional<EqualitySystem> equality;

  std::size_t dimension() const { return objective.dimension; }
  std::size_t constraint_count() const { return constraints.size(); }
};

struct DerivativeCheck {
  double max_relative_error = 0.0;
  bool pass = false;
};

struct DerivativeReport {
  DerivativeCheck gradient;
  DerivativeCheck hessian;
  DerivativeCheck time_cross;
  DerivativeCheck time_partial;

  bool pass() const {
    return gradient.pass && hessian.pass && time_cross.pass && time_partial.pass;
  }
};

// Compares the analytic derivatives of `field` at (x, t) against central
// finite differences with step h (of the value for gradient/time_partial,
// of the gradient for hessian/time_cross). Errors are relative to the
// larger of 1 and the entry magnitudes. Failures are reported, not thrown.
DerivativeReport validate_derivatives(const TimeVaryingScalarField& field, const Vec& x, double t,
                                      double h, double tol);

// Saddle function L(z, t) = f0(x, t) + multipliers^T (A(t) x - b(t)) on the
// stacked state z = (x, multipliers). Requires an equality system and no
// inequality constraints.
TimeVaryingScalarField lagrangian_field(const TrackingProblem& problem);

}  // namespace tvopt
