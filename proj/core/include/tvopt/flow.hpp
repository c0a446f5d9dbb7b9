#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tvopt/barrier.hpp"
#include "tvopt/dense.hpp"
#include "tvopt/problem.hpp"

namespace tvopt {

// Symmetric positive definite gain with a declared spectral floor sigma;
// sigma is the guaranteed exponential tracking rate. Validated at
// construction (P - sigma I must pass a shifted Cholesky).
class GainMatrix {
 public:
  GainMatrix(Matrix gain, double sigma);
  static GainMatrix isotropic(std::size_t dimension, double sigma);

  const Matrix& matrix() const { return gain_; }
  double sigma() const { return sigma_; }
  std::size_t dimension() const { return gain_.rows(); }
  Vec apply(const Vec& v) const { return gain_.apply(v); }

 private:
  Matrix gain_;
  double sigma_;
};

// Integrator state. For the equality-constrained flow, `multipliers`
// carries the stacked dual block; the other flows leave it empty.
struct FlowState {
  double t = 0.0;
  Vec x;
  std::optional<Vec> multipliers;
  double last_step = 0.0;
  std::size_t step_count = 0;
  std::size_t reject_count = 0;
};

struct IntegratorOptions {
  double max_step = 0.01;
  double min_step = 1e-7;
  double shrink = 0.5;            // step multiplier applied on rejection
  double sample_interval = 0.005; // model-time spacing of trace records
};

// A first-order flow on a flat state vector. `admissible`, when set, must
// accept a state before it can become the new iterate; the interior-point
// flow uses it to keep every accepted state inside the barrier domain.
struct FlowField {
  std::size_t state_dimension = 0;
  std::size_t multiplier_count = 0;
  std::function<Vec(const Vec&, double)> velocity;
  std::function<bool(const Vec&, double)> admissible;
  std::shared_ptr<std::size_t> regularization_count;  // interior-point only
};

// Velocity of the prediction-correction Newton dynamics on an
// unconstrained objective: -hess^{-1} (P grad + time_cross).
Vec unconstrained_flow_field(const TrackingProblem& problem, const GainMatrix& gain, const Vec& x,
                             double t);

// Same dynamics on the equality-constrained saddle function over
// z = (x, multipliers); the saddle system is solved with the symmetric
// indefinite factorization. Singular propagates when A(t) loses rank.
Vec equality_flow_field(const TrackingProblem& problem, const GainMatrix& gain, const Vec& z,
                        double t);

// Same dynamics on the relaxed barrier. On a Cholesky failure one retry is
// made with the Hessian lifted by 1e-8 * (1 + trace/n); a second failure
// propagates. `regularizations` (optional) is incremented per retry.
Vec interior_point_flow_field(const BarrierField& barrier, const GainMatrix& gain, const Vec& x,
                              double t, std::size_t* regularizations = nullptr);

FlowField unconstrained_flow(const TrackingProblem& problem, const GainMatrix& gain);
FlowField equality_flow(const TrackingProblem& problem, const GainMatrix& gain);
FlowField interior_point_flow(const BarrierField& barrier, const GainMatrix& gain);

struct FlowTrace {
  std::vector<FlowState> samples;
  FlowState final_state;
  std::size_t regularization_count = 0;
};

using SampleCallback = std::function<void(const FlowState&)>;

// Explicit Euler with reject-and-shrink domain guarding. Steps are capped
// so accepted states land exactly on the sample grid start.t + k * interval
// (traces stay comparable across step policies and sampled states are
// always accepted ones). A tentative state that fails `admissible`, or a
// velocity evaluation that fails numerically, rejects the step and shrinks
// it; once the step falls below min_step the integration aborts with
// StepCollapse. Throws DomainViolation when the initial state is already
// outside the flow's domain.
FlowTrace integrate(const FlowField& field, const FlowState& start, double t_end,
                    const IntegratorOptions& options, const SampleCallback& on_sample = {});

}  // namespace tvopt
