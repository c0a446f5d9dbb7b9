#include "tvopt/barrier.hpp"

#include <cmath>
#include <utility>

#include "tvopt/errors.hpp"

namespace tvopt {

namespace {
constexpr double kBoundaryGuard = 1e-14;
}

BarrierField::BarrierField(TrackingProblem problem, ScheduleParams schedule)
    : problem_(std::make_shared<const TrackingProblem>(std::move(problem))),
      schedule_(schedule) {
  validate(schedule_);
}

std::vector<double> BarrierField::margins(const Vec& x, double t) const {
  const double s = slack(schedule_, t).value;
  std::vector<double> out;
  out.reserve(problem_->constraints.size());
  for (const auto& constraint : problem_->constraints) {
    const double margin = s - constraint.value(x, t);
    if (margin <= kBoundaryGuard)
      throw DomainViolation("barrier: point is outside the relaxed feasible region");
    out.push_back(margin);
  }
  return out;
}

bool BarrierField::contains(const Vec& x, double t) const {
  const double s = slack(schedule_, t).value;
  for (const auto& constraint : problem_->constraints)
    if (s - constraint.value(x, t) <= kBoundaryGuard) return false;
  return true;
}

double BarrierField::value(const Vec& x, double t) const {
  if (problem_->constraints.empty()) return problem_->objective.value(x, t);
  const std::vector<double> m = margins(x, t);
  const double c = barrier_coefficient(schedule_, t).value;
  double logsum = 0.0;
  for (double margin : m) logsum += std::log(margin);
  return problem_->objective.value(x, t) - logsum / c;
}

Vec BarrierField::gradient(const Vec& x, double t) const {
  if (problem_->constraints.empty()) return problem_->objective.gradient(x, t);
  const std::vector<double> m = margins(x, t);
  const double c = barrier_coefficient(schedule_, t).value;
  Vec g = problem_->objective.gradient(x, t);
  for (std::size_t i = 0; i < m.size(); ++i)
    axpy(g, 1.0 / (c * m[i]), problem_->constraints[i].gradient(x, t));
  return g;
}

Matrix BarrierField::hessian(const Vec& x, double t) const {
  if (problem_->constraints.empty()) return problem_->objective.hessian(x, t);
  const std::vector<double> m = margins(x, t);
  const double c = barrier_coefficient(schedule_, t).value;
  Matrix h = problem_->objective.hessian(x, t);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& constraint = problem_->constraints[i];
    h.add_outer_product(constraint.gradient(x, t), 1.0 / (c * m[i] * m[i]));
    h.add_scaled(constraint.hessian(x, t), 1.0 / (c * m[i]));
  }
  return h;
}

Vec BarrierField::time_cross(const Vec& x, double t) const {
  if (problem_->constraints.empty()) return problem_->objective.time_cross(x, t);
  const std::vector<double> m = margins(x, t);
  const auto [c, c_rate] = barrier_coefficient(schedule_, t);
  const double s_rate = slack(schedule_, t).rate;

  Vec out = problem_->objective.time_cross(x, t);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& constraint = problem_->constraints[i];
    const Vec grad_i = constraint.gradient(x, t);
    // d/dt of (1/c) * grad_i / margin_i, holding x fixed
    axpy(out, -c_rate / (c * c * m[i]), grad_i);
    axpy(out, 1.0 / (c * m[i]), constraint.time_cross(x, t));
    const double margin_rate = s_rate - constraint.time_partial(x, t);
    axpy(out, -margin_rate / (c * m[i] * m[i]), grad_i);
  }
  return out;
}

double BarrierField::time_partial(const Vec& x, double t) const {
  if (problem_->constraints.empty()) return problem_->objective.time_partial(x, t);
  const std::vector<double> m = margins(x, t);
  const auto [c, c_rate] = barrier_coefficient(schedule_, t);
  const auto s = slack(schedule_, t);

  double out = problem_->objective.time_partial(x, t);
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += c_rate / (c * c) * std::log(m[i]);
    out -= (s.rate - problem_->constraints[i].time_partial(x, t)) / (c * m[i]);
  }
  return out;
}

TimeVaryingScalarField BarrierField::as_field() const {
  TimeVaryingScalarField field;
  field.dimension = dimension();
  const BarrierField self = *this;  // shares the underlying problem
  field.value = [self](const Vec& x, double t) { return self.value(x, t); };
  field.gradient = [self](const Vec& x, double t) { return self.gradient(x, t); };
  field.hessian = [self](const Vec& x, double t) { return self.hessian(x, t); };
  field.time_cross = [self](const Vec& x, double t) { return self.time_cross(x, t); };
  field.time_partial = [self](const Vec& x, double t) { return self.time_partial(x, t); };
  return field;
}

}  // namespace tvopt
