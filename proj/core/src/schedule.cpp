#include "tvopt/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tvopt {

void validate(const ScheduleParams& params) {
  if (!(params.c0 > 0.0)) throw std::invalid_argument("schedule: c0 must be positive");
  if (!(params.gamma_c >= 0.0)) throw std::invalid_argument("schedule: gamma_c must be >= 0");
  if (!(params.s0 >= 0.0)) throw std::invalid_argument("schedule: s0 must be >= 0");
  if (!(params.alpha > 0.0)) throw std::invalid_argument("schedule: alpha must be positive");
}

RateSample barrier_coefficient(const ScheduleParams& params, double t) {
  const double c = params.c0 * std::exp(params.gamma_c * t);
  return {c, params.gamma_c * c};
}

RateSample slack(const ScheduleParams& params, double t) {
  const double s = params.s0 * std::exp(-params.alpha * t);
  return {s, -params.alpha * s};
}

double constraint_excess(const TrackingProblem& problem, const Vec& x, double t) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& constraint : problem.constraints)
    worst = std::max(worst, constraint.value(x, t));
  return worst;
}

double initial_slack(const TrackingProblem& problem, const Vec& x0, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("initial_slack: epsilon must be positive");
  const double worst = constraint_excess(problem, x0, 0.0);
  if (worst <= 0.0) return 0.0;
  return worst + epsilon;
}

double initial_slack(const TrackingProblem& problem, const Vec& x0) {
  const double worst = constraint_excess(problem, x0, 0.0);
  if (worst <= 0.0) return 0.0;
  return worst + 1e-3 * std::max(1.0, std::abs(worst));
}

}  // namespace tvopt
