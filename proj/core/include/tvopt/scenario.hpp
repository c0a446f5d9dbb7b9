#pragma once

#include <cstdint>
#include <vector>

#include "tvopt/dense.hpp"
#include "tvopt/problem.hpp"

namespace tvopt {

// A target trajectory: one monomial polynomial per spatial component on
// the normalized horizon [0, horizon]. Evaluation and both time
// derivatives are exact polynomial operations.
struct PolynomialPath {
  std::size_t dimension = 0;
  std::size_t basis_size = 0;  // monomials 1, t, ..., t^(basis_size-1)
  double horizon = 1.0;
  std::vector<double> coefficients;  // component-major, dimension x basis_size

  double coefficient(std::size_t component, std::size_t power) const {
    return coefficients[component * basis_size + power];
  }

  Vec position(double t) const;
  Vec velocity(double t) const;
  Vec acceleration(double t) const;
};

// Interpolation data: points[l] must be reached at times[l] = l * horizon
// / (interior + 1); the first and last points are the endpoints.
struct WaypointSet {
  std::size_t dimension = 0;
  double horizon = 1.0;
  std::vector<Vec> points;
  std::vector<double> times;

  std::size_t interior_count() const { return points.size() < 2 ? 0 : points.size() - 2; }
};

// Draws interior + 2 points uniformly from the unit box with a seeded
// generator; identical seeds give identical sets.
WaypointSet generate_waypoints(std::uint64_t seed, std::size_t interior, std::size_t dimension);

// Fits, per component, the polynomial that minimizes the integral of the
// squared acceleration subject to passing through every waypoint. The
// saddle system pairs the acceleration Gram matrix with the interpolation
// rows and is solved with fully pivoted elimination; at high basis sizes
// the conditioning is severe, so the contract is the waypoint residual,
// not coefficient accuracy. Throws Singular on degenerate waypoint times.
PolynomialPath fit_min_acceleration_path(const WaypointSet& waypoints, std::size_t basis_size);

// Integral of the squared acceleration over the horizon (the quadratic
// form the fit minimizes).
double path_energy(const PolynomialPath& path);

// Tracking objective that blends two target quadratics through a smooth
// switch: weight(t) = 1 - 1/(1 + exp(-rate (t - switch_time))) moves the
// focus from the first path to the second around switch_time.
TrackingProblem switching_objective(const PolynomialPath& first, const PolynomialPath& second,
                                    double switch_time, double switch_rate);

// Two planar agents minimizing their mutual squared distance while each
// stays within `radius` of its own moving target. The objective is only
// positive semidefinite; the declared curvature bound is sampled from the
// barrier Hessian over a strictly feasible tube at t = 0 and feeds bound
// reporting only, never the dynamics.
TrackingProblem two_agent_problem(const PolynomialPath& first, const PolynomialPath& second,
                                  double radius);

}  // namespace tvopt
