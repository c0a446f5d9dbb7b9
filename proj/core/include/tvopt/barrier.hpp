#pragma once

#include <memory>

#include "tvopt/dense.hpp"
#include "tvopt/problem.hpp"
#include "tvopt/schedule.hpp"

namespace tvopt {

// The relaxed log-barrier of a tracking problem,
//
//   value(x, t) = f0(x, t) - (1/c(t)) * sum_i log(s(t) - f_i(x, t)),
//
// defined on the open region where every f_i(x, t) < s(t). Evaluation
// outside that region throws DomainViolation; the integrator relies on
// that crisp signal to backtrack, so the barrier never returns infinities.
// With no constraints the field behaves bit-identically to the objective.
class BarrierField {
 public:
  BarrierField(TrackingProblem problem, ScheduleParams schedule);

  std::size_t dimension() const { return problem_->dimension(); }
  std::size_t constraint_count() const { return problem_->constraint_count(); }
  const TrackingProblem& problem() const { return *problem_; }
  const ScheduleParams& schedule() const { return schedule_; }

  // True when x sits strictly inside the relaxed domain at time t.
  // Margins within 1e-14 of the boundary count as outside; closer than
  // that the squared-margin terms lose all precision.
  bool contains(const Vec& x, double t) const;

  double value(const Vec& x, double t) const;
  Vec gradient(const Vec& x, double t) const;
  Matrix hessian(const Vec& x, double t) const;
  Vec time_cross(const Vec& x, double t) const;
  double time_partial(const Vec& x, double t) const;

  // View of this barrier as a plain time-varying scalar field.
  TimeVaryingScalarField as_field() const;

 private:
  // s(t) - f_i(x, t) for every constraint; throws DomainViolation when any
  // margin is at or below the boundary guard.
  std::vector<double> margins(const Vec& x, double t) const;

  std::shared_ptr<const TrackingProblem> problem_;
  ScheduleParams schedule_;
};

}  // namespace tvopt
