#pragma once

#include <optional>

#include "tvopt/barrier.hpp"
#include "tvopt/dense.hpp"
#include "tvopt/problem.hpp"
#include "tvopt/schedule.hpp"

namespace tvopt {

// Ground truth produced by a frozen-time solve: the stationarity point,
// recovered multipliers (empty for unconstrained solves), objective value
// and the worst violation among the four optimality conditions.
struct StaticSolution {
  Vec x_star;
  Vec lambda_star;
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
};

// Suboptimality gaps and their certified bounds at one time instant.
// A gap is satisfied when it lies in [0, bound] up to 1e-6 slack.
struct BoundReport {
  double perturbation_gap = 0.0;    // optimal value loss caused by the slack
  double perturbation_bound = 0.0;  // sum_i lambda_i * s
  double barrier_gap = 0.0;         // barrier minimizer vs relaxed optimum
  double barrier_bound = 0.0;       // p / c
  bool perturbation_ok = false;
  bool barrier_ok = false;
};

// Damped-Newton minimization of the objective frozen at time t, to
// gradient norm <= tol. Throws MaxIterations when the budget runs out.
StaticSolution static_minimize_unconstrained(const TimeVaryingScalarField& objective, double t,
                                             const Vec& x_init, double tol);

// Frozen-time solve of the inequality-constrained problem by barrier
// path-following (coefficient grown tenfold per stage, warm-started damped
// Newton inside) until the duality-gap surrogate p/c drops below tol.
// Multipliers are recovered from the final barrier margins. Throws
// InfeasibleAtTime when no strictly feasible point is found.
StaticSolution static_solve_constrained(const TrackingProblem& problem, double t, double tol,
                                        const std::optional<Vec>& hint = {});

// Same with every constraint relaxed by s_value (f_i <= s_value).
StaticSolution static_solve_perturbed(const TrackingProblem& problem, double t, double s_value,
                                      double tol, const std::optional<Vec>& hint = {});

// Minimizer of the relaxed barrier frozen at time t, to gradient norm
// <= tol, started from `hint` when it is strictly inside the domain.
Vec static_barrier_minimizer(const BarrierField& barrier, double t, double tol,
                             const std::optional<Vec>& hint = {});

// Evaluates both suboptimality gaps at time t for a given barrier
// minimizer, from precomputed frozen-time solves.
BoundReport evaluate_bounds(const TrackingProblem& problem, const ScheduleParams& schedule,
                            double t, const Vec& z_tilde, const StaticSolution& constrained,
                            const StaticSolution& perturbed);

// Convenience overload that performs the frozen-time solves itself.
BoundReport evaluate_bounds(const TrackingProblem& problem, const ScheduleParams& schedule,
                            double t, const Vec& z_tilde, double tol = 1e-8);

}  // namespace tvopt
