#include "tvopt/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "tvopt/errors.hpp"

namespace tvopt {

namespace {

Vec flatten(const FlowState& state, std::size_t state_dimension, std::size_t multiplier_count) {
  const std::size_t primal = state_dimension - multiplier_count;
  if (state.x.size() != primal)
    throw std::invalid_argument("integrate: state dimension does not match the flow field");
  Vec flat(state_dimension);
  for (std::size_t i = 0; i < primal; ++i) flat[i] = state.x[i];
  if (multiplier_count > 0 && state.multipliers) {
    if (state.multipliers->size() != multiplier_count)
      throw std::invalid_argument("integrate: multiplier block has the wrong size");
    for (std::size_t i = 0; i < multiplier_count; ++i) flat[primal + i] = (*state.multipliers)[i];
  }
  return flat;
}

FlowState unflatten(const Vec& flat, double t, std::size_t multiplier_count) {
  const std::size_t primal = flat.size() - multiplier_count;
  FlowState state;
  state.t = t;
  state.x = Vec(primal);
  for (std::size_t i = 0; i < primal; ++i) state.x[i] = flat[i];
  if (multiplier_count > 0) {
    Vec m(multiplier_count);
    for (std::size_t i = 0; i < multiplier_count; ++i) m[i] = flat[primal + i];
    state.multipliers = std::move(m);
  }
  return state;
}

}  // namespace

GainMatrix::GainMatrix(Matrix gain, double sigma) : gain_(std::move(gain)), sigma_(sigma) {
  if (!gain_.square()) throw std::invalid_argument("GainMatrix: gain must be square");
  if (!(sigma_ > 0.0)) throw std::invalid_argument("GainMatrix: sigma must be positive");
  const double scale = std::max(1.0, gain_.max_abs());
  if (gain_.symmetry_gap() > 1e-10 * scale)
    throw std::invalid_argument("GainMatrix: gain must be symmetric");
  Matrix shifted = gain_;
  shifted.add_scaled_identity(-sigma_ + 1e-12 * scale);
  if (!is_positive_definite(shifted))
    throw std::invalid_argument("GainMatrix: smallest eigenvalue is below the declared sigma");
}

GainMatrix GainMatrix::isotropic(std::size_t dimension, double sigma) {
  Matrix gain = Matrix::identity(dimension);
  for (std::size_t i = 0; i < dimension; ++i) gain(i, i) = sigma;
  return GainMatrix(std::move(gain), sigma);
}

Vec unconstrained_flow_field(const TrackingProblem& problem, const GainMatrix& gain, const Vec& x,
                             double t) {
  const Vec rhs = gain.apply(problem.objective.gradient(x, t)) + problem.objective.time_cross(x, t);
  return -solve_spd(problem.objective.hessian(x, t), rhs);
}

Vec equality_flow_field(const TrackingProblem& problem, const GainMatrix& gain, const Vec& z,
                        double t) {
  const TimeVaryingScalarField saddle = lagrangian_field(problem);
  const Vec rhs = gain.apply(saddle.gradient(z, t)) + saddle.time_cross(z, t);
  return -solve_symmetric_indefinite(saddle.hessian(z, t), rhs);
}

Vec interior_point_flow_field(const BarrierField& barrier, const GainMatrix& gain, const Vec& x,
                              double t, std::size_t* regularizations) {
  const Vec rhs = gain.apply(barrier.gradient(x, t)) + barrier.time_cross(x, t);
  Matrix hess = barrier.hessian(x, t);
  try {
    return -solve_spd(hess, rhs);
  } catch (const NotPositiveDefinite&) {
    const double n = static_cast<double>(hess.rows());
    hess.add_scaled_identity(1e-8 * (1.0 + hess.trace() / n));
    if (regularizations != nullptr) ++*regularizations;
    return -solve_spd(hess, rhs);
  }
}

FlowField unconstrained_flow(const TrackingProblem& problem, const GainMatrix& gain) {
  if (gain.dimension() != problem.dimension())
    throw std::invalid_argument("unconstrained_flow: gain dimension mismatch");
  FlowField field;
  field.state_dimension = problem.dimension();
  field.velocity = [problem, gain](const Vec& x, double t) {
    return unconstrained_flow_field(problem, gain, x, t);
  };
  return field;
}

FlowField equality_flow(const TrackingProblem& problem, const GainMatrix& gain) {
  if (!problem.equality) throw MissingEqualitySystem("equality_flow: no equality system");
  const std::size_t dim = problem.dimension() + problem.equality->count;
  if (gain.dimension() != dim)
    throw std::invalid_argument("equality_flow: gain must cover the stacked state");
  const TimeVaryingScalarField saddle = lagrangian_field(problem);
  FlowField field;
  field.state_dimension = dim;
  field.multiplier_count = problem.equality->count;
  field.velocity = [saddle, gain](const Vec& z, double t) {
    const Vec rhs = gain.apply(saddle.gradient(z, t)) + saddle.time_cross(z, t);
    return -solve_symmetric_indefinite(saddle.hessian(z, t), rhs);
  };
  return field;
}

FlowField interior_point_flow(const BarrierField& barrier, const GainMatrix& gain) {
  if (gain.dimension() != barrier.dimension())
    throw std::invalid_argument("interior_point_flow: gain dimension mismatch");
  auto regularizations = std::make_shared<std::size_t>(0);
  FlowField field;
  field.state_dimension = barrier.dimension();
  field.velocity = [barrier, gain, regularizations](const Vec& x, double t) {
    return interior_point_flow_field(barrier, gain, x, t, regularizations.get());
  };
  field.admissible = [barrier](const Vec& x, double t) { return barrier.contains(x, t); };
  field.regularization_count = regularizations;
  return field;
}

FlowTrace integrate(const FlowField& field, const FlowState& start, double t_end,
                    const IntegratorOptions& options, const SampleCallback& on_sample) {
  if (!(options.min_step > 0.0) || options.min_step > options.max_step)
    throw std::invalid_argument("integrate: need 0 < min_step <= max_step");
  if (!(options.shrink > 0.0) || options.shrink >= 1.0)
    throw std::invalid_argument("integrate: shrink factor must lie in (0, 1)");
  if (!(options.sample_interval > 0.0))
    throw std::invalid_argument("integrate: sample_interval must be positive");
  if (t_end < start.t) throw std::invalid_argument("integrate: t_end precedes the start time");

  Vec state = flatten(start, field.state_dimension, field.multiplier_count);
  double t = start.t;
  if (field.admissible && !field.admissible(state, t))
    throw DomainViolation("integrate: initial state is outside the flow domain");

  const double span = t_end - start.t;
  const double slop = 1e-12 * std::max(1.0, std::abs(t_end));

  // Sample grid start.t + k * interval; the last instant is clamped to
  // t_end so rounding in k * interval cannot push it past the horizon.
  std::vector<double> sample_times;
  const auto last_index =
      static_cast<std::size_t>(std::floor(span / options.sample_interval + 1e-9));
  sample_times.reserve(last_index + 1);
  for (std::size_t k = 0; k <= last_index; ++k)
    sample_times.push_back(std::min(start.t + static_cast<double>(k) * options.sample_interval, t_end));

  FlowTrace trace;
  std::size_t steps = 0;
  std::size_t rejects = 0;
  double last_step = 0.0;
  std::size_t cursor = 0;

  auto record = [&](double at) {
    FlowState sample = unflatten(state, at, field.multiplier_count);
    sample.last_step = last_step;
    sample.step_count = steps;
    sample.reject_count = rejects;
    trace.samples.push_back(std::move(sample));
    if (on_sample) on_sample(trace.samples.back());
  };

  if (!sample_times.empty() && std::abs(sample_times[0] - t) <= slop) {
    record(t);
    cursor = 1;
  }

  while (t_end - t > slop) {
    const double target = cursor < sample_times.size() ? sample_times[cursor] : t_end;
    double h = std::min(options.max_step, target - t);
    bool lands = target - t - h <= slop;
    if (lands) h = target - t;

    while (true) {
      bool ok = true;
      Vec velocity;
      try {
        velocity = field.velocity(state, t);
      } catch (const Error&) {
        ok = false;  // treat a failed solve like an inadmissible step
      }
      const double t_next = lands ? target : t + h;
      if (ok) {
        Vec trial = state;
        axpy(trial, h, velocity);
        if (field.admissible && !field.admissible(trial, t_next)) {
          ok = false;
        } else {
          state = std::move(trial);
          t = t_next;
          ++steps;
          last_step = h;
          break;
        }
      }
      ++rejects;
      h *= options.shrink;
      lands = false;
      if (h < options.min_step)
        throw StepCollapse("integrate: step shrank below min_step at t = " + std::to_string(t));
    }

    if (cursor < sample_times.size() && t >= sample_times[cursor] - slop) {
      record(sample_times[cursor]);
      ++cursor;
    }
  }

  trace.final_state = unflatten(state, t, field.multiplier_count);
  trace.final_state.last_step = last_step;
  trace.final_state.step_count = steps;
  trace.final_state.reject_count = rejects;
  trace.regularization_count = field.regularization_count ? *field.regularization_count : 0;
  return trace;
}

}  // namespace tvopt
