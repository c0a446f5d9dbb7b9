#pragma once

#include "tvopt/dense.hpp"
#include "tvopt/problem.hpp"

namespace tvopt {

// Exponential time laws for the barrier weight c(t) = c0 * exp(gamma_c t)
// and the constraint slack s(t) = s0 * exp(-alpha t). Defaults match the
// reference constrained scenario so it runs without configuration.
struct ScheduleParams {
  double c0 = 1.0;
  double gamma_c = 6.0;
  double s0 = 0.0;
  double alpha = 10.0;
};

// Throws std::invalid_argument when a parameter is out of range
// (c0 > 0, gamma_c >= 0, s0 >= 0, alpha > 0).
void validate(const ScheduleParams& params);

// A schedule value together with its time derivative.
struct RateSample {
  double value = 0.0;
  double rate = 0.0;
};

RateSample barrier_coefficient(const ScheduleParams& params, double t);
RateSample slack(const ScheduleParams& params, double t);

// Largest constraint value max_i f_i(x, t); -infinity when there are no
// inequality constraints.
double constraint_excess(const TrackingProblem& problem, const Vec& x, double t);

// Initial slack rule: 0 when x0 already satisfies every constraint at
// t = 0, otherwise the worst violation plus epsilon so that x0 sits
// strictly inside the relaxed domain.
double initial_slack(const TrackingProblem& problem, const Vec& x0, double epsilon);

// Same with the default margin epsilon = 1e-3 * max(1, |worst violation|).
double initial_slack(const TrackingProblem& problem, const Vec& x0);

}  // namespace tvopt
