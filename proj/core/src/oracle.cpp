#include "tvopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tvopt/errors.hpp"

namespace tvopt {

namespace {

constexpr double kBoundSlack = 1e-6;
constexpr double kArmijoSlope = 0.3;
constexpr double kArmijoShrink = 0.8;
constexpr std::size_t kNewtonBudget = 200;

// A smooth convex function frozen in time. Value evaluations may throw
// DomainViolation; the line search treats that as a rejected trial.
struct FrozenFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Matrix(const Vec&)> hessian;
};

struct NewtonOutcome {
  Vec x;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
};

std::optional<double> try_value(const FrozenFunction& fn, const Vec& x) {
  try {
    const double v = fn.value(x);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const DomainViolation&) {
    return std::nullopt;
  }
}

NewtonOutcome damped_newton(const FrozenFunction& fn, Vec x, double tol,
                            std::size_t budget = kNewtonBudget) {
  const std::size_t n = x.size();
  double fx = fn.value(x);

  for (std::size_t iter = 0; iter < budget; ++iter) {
    const Vec grad = fn.gradient(x);
    const double grad_norm = grad.norm();
    if (grad_norm <= tol) return {std::move(x), grad_norm, iter};

    Matrix hess = fn.hessian(x);
    Vec direction;
    double lift = 0.0;
    while (true) {
      try {
        direction = -solve_spd(hess, grad);
        break;
      } catch (const NotPositiveDefinite&) {
        const double base = 1e-10 * (1.0 + std::abs(hess.trace()) / static_cast<double>(n));
        lift = lift == 0.0 ? base : lift * 100.0;
        if (lift > 1e6) throw;
        hess.add_scaled_identity(lift);
      }
    }

    const double slope = dot(grad, direction);
    double step = 1.0;
    bool accepted = false;
    for (std::size_t ls = 0; ls < 200; ++ls) {
      Vec trial = x;
      axpy(trial, step, direction);
      const auto trial_value = try_value(fn, trial);
      if (trial_value && *trial_value <= fx + kArmijoSlope * step * slope) {
        x = std::move(trial);
        fx = *trial_value;
        accepted = true;
        break;
      }
      step *= kArmijoShrink;
      if (step < 1e-16) break;
    }
    if (!accepted) throw MaxIterations("damped_newton: line search stalled");
  }
  throw MaxIterations("damped_newton: iteration budget exhausted");
}

// Frozen-time view of the inequality constraints with a uniform shift:
// the feasibility region is { x : f_i(x, t) - shift <= 0 }.
struct FrozenInequalities {
  const TrackingProblem* problem = nullptr;
  double t = 0.0;
  double shift = 0.0;

  std::size_t count() const { return problem->constraint_count(); }
  double value(std::size_t i, const Vec& x) const {
    return problem->constraints[i].value(x, t) - shift;
  }
  Vec gradient(std::size_t i, const Vec& x) const {
    return problem->constraints[i].gradient(x, t);
  }
  double worst(const Vec& x) const {
    double w = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count(); ++i) w = std::max(w, value(i, x));
    return w;
  }
};

// Smoothed-maximum descent to a strictly feasible point: minimize
// tau * log sum exp(f_i / tau) for a few shrinking temperatures.
Vec find_interior_point(const FrozenInequalities& ineq, std::optional<Vec> hint) {
  const std::size_t n = ineq.problem->dimension();
  Vec x = hint ? *hint : Vec(n);
  if (ineq.worst(x) < 0.0) return x;

  const double scale = std::max(1.0, std::abs(ineq.worst(x)));
  const double temperatures[] = {0.3 * scale, 0.03 * scale, 0.003 * scale};
  for (double tau : temperatures) {
    FrozenFunction smooth_max;
    smooth_max.value = [&ineq, tau](const Vec& p) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ineq.count(); ++i) top = std::max(top, ineq.value(i, p));
      double sum = 0.0;
      for (std::size_t i = 0; i < ineq.count(); ++i)
        sum += std::exp((ineq.value(i, p) - top) / tau);
      return top + tau * std::log(sum);
    };
    smooth_max.gradient = [&ineq, tau, n](const Vec& p) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ineq.count(); ++i) top = std::max(top, ineq.value(i, p));
      std::vector<double> weights(ineq.count());
      double sum = 0.0;
      for (std::size_t i = 0; i < ineq.count(); ++i) {
        weights[i] = std::exp((ineq.value(i, p) - top) / tau);
        sum += weights[i];
      }
      Vec g(n);
      for (std::size_t i = 0; i < ineq.count(); ++i)
        axpy(g, weights[i] / sum, ineq.gradient(i, p));
      return g;
    };
    smooth_max.hessian = [&ineq, tau, n](const Vec& p) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ineq.count(); ++i) top = std::max(top, ineq.value(i, p));
      std::vector<double> weights(ineq.count());
      double sum = 0.0;
      for (std::size_t i = 0; i < ineq.count(); ++i) {
        weights[i] = std::exp((ineq.value(i, p) - top) / tau);
        sum += weights[i];
      }
      Matrix h(n, n);
      Vec mean_grad(n);
      for (std::size_t i = 0; i < ineq.count(); ++i) {
        const double w = weights[i] / sum;
        const Vec gi = ineq.gradient(i, p);
        h.add_scaled(ineq.problem->constraints[i].hessian(p, ineq.t), w);
        h.add_outer_product(gi, w / tau);
        axpy(mean_grad, w, gi);
      }
      h.add_outer_product(mean_grad, -1.0 / tau);
      h.add_scaled_identity(1e-12 * (1.0 + std::abs(h.trace()) / static_cast<double>(n)));
      return h;
    };

    try {
      x = damped_newton(smooth_max, x, 1e-9 * scale, 120).x;
    } catch (const MaxIterations&) {
      // keep the best iterate the stage produced and test feasibility
    }
    if (ineq.worst(x) < 0.0) return x;
  }
  throw InfeasibleAtTime("no strictly feasible point found at t = " + std::to_string(ineq.t),
                         ineq.t);
}

StaticSolution solve_inequality_instance(const TrackingProblem& problem, double t, double shift,
                                         double tol, const std::optional<Vec>& hint) {
  if (problem.equality)
    throw std::invalid_argument("frozen-time solver does not handle equality systems");
  if (!(tol > 0.0)) throw std::invalid_argument("frozen-time solver: tol must be positive");

  const std::size_t p = problem.constraint_count();
  if (p == 0) {
    const Vec x0 = hint ? *hint : Vec(problem.dimension());
    return static_minimize_unconstrained(problem.objective, t, x0, tol);
  }

  const FrozenInequalities ineq{&problem, t, shift};
  Vec x = (hint && ineq.worst(*hint) < 0.0) ? *hint : find_interior_point(ineq, hint);

  std::size_t iterations = 0;
  double coefficient = 1.0;
  for (std::size_t stage = 0; stage < 64; ++stage) {
    FrozenFunction stage_fn;
    stage_fn.value = [&problem, &ineq, t, coefficient](const Vec& q) {
      double logsum = 0.0;
      for (std::size_t i = 0; i < ineq.count(); ++i) {
        const double margin = -ineq.value(i, q);
        if (margin <= 0.0) throw DomainViolation("barrier stage: infeasible trial point");
        logsum += std::log(margin);
      }
      return problem.objective.value(q, t) - logsum / coefficient;
    };
    stage_fn.gradient = [&problem, &ineq, t, coefficient](const Vec& q) {
      Vec g = problem.objective.gradient(q, t);
      for (std::size_t i = 0; i < ineq.count(); ++i) {
        const double margin = -ineq.value(i, q);
        if (margin <= 0.0) throw DomainViolation("barrier stage: infeasible trial point");
        axpy(g, 1.0 / (coefficient * margin), ineq.gradient(i, q));
      }
      return g;
    };
    stage_fn.hessian = [&problem, &ineq, t, coefficient](const Vec& q) {
      Matrix h = problem.objective.hessian(q, t);
      for (std::size_t i = 0; i < ineq.count(); ++i) {
        const double margin = -ineq.value(i, q);
        if (margin <= 0.0) throw DomainViolation("barrier stage: infeasible trial point");
        h.add_outer_product(ineq.gradient(i, q), 1.0 / (coefficient * margin * margin));
        h.add_scaled(problem.constraints[i].hessian(q, t), 1.0 / (coefficient * margin));
      }
      return h;
    };

    const NewtonOutcome outcome = damped_newton(stage_fn, std::move(x), tol);
    x = outcome.x;
    iterations += outcome.iterations;
    if (static_cast<double>(p) / coefficient <= tol) break;
    coefficient *= 10.0;
  }

  StaticSolution solution;
  solution.lambda_star = Vec(p);
  for (std::size_t i = 0; i < p; ++i)
    solution.lambda_star[i] = 1.0 / (coefficient * (-ineq.value(i, x)));
  solution.objective_value = problem.objective.value(x, t);
  solution.iterations = iterations;

  // optimality conditions of the (shifted) frozen problem
  Vec stationarity = problem.objective.gradient(x, t);
  double complementarity = 0.0;
  double dual_violation = 0.0;
  double primal_violation = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    axpy(stationarity, solution.lambda_star[i], ineq.gradient(i, x));
    complementarity = std::max(complementarity,
                               std::abs(solution.lambda_star[i] * ineq.value(i, x)));
    dual_violation = std::max(dual_violation, -solution.lambda_star[i]);
    primal_violation = std::max(primal_violation, ineq.value(i, x));
  }
  solution.kkt_residual = std::max({stationarity.norm(), complementarity,
                                    std::max(0.0, dual_violation), std::max(0.0, primal_violation)});
  solution.x_star = std::move(x);
  return solution;
}

}  // namespace

StaticSolution static_minimize_unconstrained(const TimeVaryingScalarField& objective, double t,
                                             const Vec& x_init, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("static_minimize_unconstrained: tol must be positive");
  FrozenFunction fn;
  fn.value = [&objective, t](const Vec& x) { return objective.value(x, t); };
  fn.gradient = [&objective, t](const Vec& x) { return objective.gradient(x, t); };
  fn.hessian = [&objective, t](const Vec& x) { return objective.hessian(x, t); };

  NewtonOutcome outcome = damped_newton(fn, x_init, tol);
  StaticSolution solution;
  solution.objective_value = objective.value(outcome.x, t);
  solution.kkt_residual = outcome.grad_norm;
  solution.iterations = outcome.iterations;
  solution.x_star = std::move(outcome.x);
  return solution;
}

StaticSolution static_solve_constrained(const TrackingProblem& problem, double t, double tol,
                                        const std::optional<Vec>& hint) {
  return solve_inequality_instance(problem, t, 0.0, tol, hint);
}

StaticSolution static_solve_perturbed(const TrackingProblem& problem, double t, double s_value,
                                      double tol, const std::optional<Vec>& hint) {
  return solve_inequality_instance(problem, t, s_value, tol, hint);
}

Vec static_barrier_minimizer(const BarrierField& barrier, double t, double tol,
                             const std::optional<Vec>& hint) {
  if (!(tol > 0.0)) throw std::invalid_argument("static_barrier_minimizer: tol must be positive");
  Vec x;
  if (hint && barrier.contains(*hint, t)) {
    x = *hint;
  } else {
    const double s = slack(barrier.schedule(), t).value;
    const FrozenInequalities ineq{&barrier.problem(), t, s};
    x = barrier.constraint_count() == 0 ? (hint ? *hint : Vec(barrier.dimension()))
                                        : find_interior_point(ineq, hint);
  }

  FrozenFunction fn;
  fn.value = [&barrier, t](const Vec& q) { return barrier.value(q, t); };
  fn.gradient = [&barrier, t](const Vec& q) { return barrier.gradient(q, t); };
  fn.hessian = [&barrier, t](const Vec& q) { return barrier.hessian(q, t); };
  return damped_newton(fn, std::move(x), tol).x;
}

BoundReport evaluate_bounds(const TrackingProblem& problem, const ScheduleParams& schedule,
                            double t, const Vec& z_tilde, const StaticSolution& constrained,
                            const StaticSolution& perturbed) {
  const double s = slack(schedule, t).value;
  const double c = barrier_coefficient(schedule, t).value;

  BoundReport report;
  report.perturbation_gap = constrained.objective_value - perturbed.objective_value;
  report.perturbation_bound = 0.0;
  for (std::size_t i = 0; i < constrained.lambda_star.size(); ++i)
    report.perturbation_bound += constrained.lambda_star[i] * s;
  report.barrier_gap = problem.objective.value(z_tilde, t) - perturbed.objective_value;
  report.barrier_bound = static_cast<double>(problem.constraint_count()) / c;

  report.perturbation_ok = report.perturbation_gap >= -kBoundSlack &&
                           report.perturbation_gap <= report.perturbation_bound + kBoundSlack;
  report.barrier_ok = report.barrier_gap >= -kBoundSlack &&
                      report.barrier_gap <= report.barrier_bound + kBoundSlack;
  return report;
}

BoundReport evaluate_bounds(const TrackingProblem& problem, const ScheduleParams& schedule,
                            double t, const Vec& z_tilde, double tol) {
  const double s = slack(schedule, t).value;
  const StaticSolution constrained = static_solve_constrained(problem, t, tol);
  const StaticSolution perturbed =
      s == 0.0 ? constrained : static_solve_perturbed(problem, t, s, tol);
  return evaluate_bounds(problem, schedule, t, z_tilde, constrained, perturbed);
}

}  // namespace tvopt
