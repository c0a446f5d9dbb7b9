#include "tvopt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>

#include "tvopt/barrier.hpp"
#include "tvopt/errors.hpp"
#include "tvopt/schedule.hpp"

namespace tvopt {

namespace {

double horner(const PolynomialPath& path, std::size_t component, double t, std::size_t deriv) {
  // evaluate the deriv-th time derivative of the monomial series
  double acc = 0.0;
  for (std::size_t jj = path.basis_size; jj-- > deriv;) {
    double factor = 1.0;
    for (std::size_t d = 0; d < deriv; ++d) factor *= static_cast<double>(jj - d);
    acc = acc * t + factor * path.coefficient(component, jj);
  }
  return acc;
}

double uniform_unit(std::mt19937_64& engine) {
  // 53-bit mantissa draw; avoids distribution-implementation differences
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Gaussian elimination with full pivoting. Row swaps are applied across
// the whole row (multiplier columns included), so a solve may apply the
// recorded swaps to the right-hand side up front and then run clean
// triangular sweeps.
class FullPivotLu {
 public:
  explicit FullPivotLu(const Matrix& a) : lu_(a), column_of_(a.rows()) {
    const std::size_t n = lu_.rows();
    for (std::size_t i = 0; i < n; ++i) column_of_[i] = i;
    // The fit systems are legitimately conditioned down to eps-level
    // pivots; degenerate waypoint times cancel to *exactly* zero. Only a
    // hard zero (or denormal collapse) counts as rank deficiency here.
    const double tiny = 1e-250 * std::max(a.max_abs(), 1.0);

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t pr = k, pc = k;
      double best = 0.0;
      for (std::size_t r = k; r < n; ++r)
        for (std::size_t c = k; c < n; ++c) {
          const double v = std::abs(lu_(r, c));
          if (v > best) {
            best = v;
            pr = r;
            pc = c;
          }
        }
      if (best <= tiny)
        throw Singular("fit_min_acceleration_path: saddle system is rank deficient");
      row_swaps_.emplace_back(k, pr);
      if (pr != k)
        for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(pr, c));
      if (pc != k) {
        for (std::size_t r = 0; r < n; ++r) std::swap(lu_(r, k), lu_(r, pc));
        std::swap(column_of_[k], column_of_[pc]);
      }
      const double pivot = lu_(k, k);
      for (std::size_t r = k + 1; r < n; ++r) {
        const double mult = lu_(r, k) / pivot;
        lu_(r, k) = mult;
        for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= mult * lu_(k, c);
      }
    }
  }

  Vec solve(Vec rhs) const {
    const std::size_t n = lu_.rows();
    for (const auto& [a, b] : row_swaps_)
      if (a != b) std::swap(rhs[a], rhs[b]);
    for (std::size_t i = 1; i < n; ++i) {
      double sum = rhs[i];
      for (std::size_t c = 0; c < i; ++c) sum -= lu_(i, c) * rhs[c];
      rhs[i] = sum;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double sum = rhs[ii];
      for (std::size_t c = ii + 1; c < n; ++c) sum -= lu_(ii, c) * rhs[c];
      rhs[ii] = sum / lu_(ii, ii);
    }
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[column_of_[i]] = rhs[i];
    return x;
  }

 private:
  Matrix lu_;
  std::vector<std::pair<std::size_t, std::size_t>> row_swaps_;
  std::vector<std::size_t> column_of_;
};

Vec solve_full_pivot(const Matrix& a, const Vec& b) {
  const FullPivotLu factor(a);
  Vec x = factor.solve(b);
  // two refinement passes rein in the residual on ill-conditioned fits
  for (int pass = 0; pass < 2; ++pass) {
    const Vec residual = b - a.apply(x);
    x += factor.solve(residual);
  }
  return x;
}

// Gram matrix of second derivatives of monomials on [0, 1]:
// integral of (t^j)'' (t^k)'' dt.
Matrix acceleration_gram(std::size_t basis_size) {
  Matrix h(basis_size, basis_size);
  for (std::size_t j = 2; j < basis_size; ++j)
    for (std::size_t k = 2; k < basis_size; ++k) {
      const double jj = static_cast<double>(j), kk = static_cast<double>(k);
      h(j, k) = jj * (jj - 1.0) * kk * (kk - 1.0) / (jj + kk - 3.0);
    }
  return h;
}

}  // namespace

Vec PolynomialPath::position(double t) const {
  Vec out(dimension);
  for (std::size_t c = 0; c < dimension; ++c) out[c] = horner(*this, c, t, 0);
  return out;
}

Vec PolynomialPath::velocity(double t) const {
  Vec out(dimension);
  for (std::size_t c = 0; c < dimension; ++c) out[c] = horner(*this, c, t, 1);
  return out;
}

Vec PolynomialPath::acceleration(double t) const {
  Vec out(dimension);
  for (std::size_t c = 0; c < dimension; ++c) out[c] = horner(*this, c, t, 2);
  return out;
}

WaypointSet generate_waypoints(std::uint64_t seed, std::size_t interior, std::size_t dimension) {
  if (interior < 1)
    throw std::invalid_argument("generate_waypoints: need at least one interior point");
  std::mt19937_64 engine(seed);
  WaypointSet set;
  set.dimension = dimension;
  const std::size_t total = interior + 2;
  set.points.reserve(total);
  set.times.reserve(total);
  for (std::size_t l = 0; l < total; ++l) {
    Vec point(dimension);
    for (std::size_t d = 0; d < dimension; ++d) point[d] = uniform_unit(engine);
    set.points.push_back(std::move(point));
    set.times.push_back(static_cast<double>(l) * set.horizon / static_cast<double>(interior + 1));
  }
  return set;
}

PolynomialPath fit_min_acceleration_path(const WaypointSet& waypoints, std::size_t basis_size) {
  const std::size_t m = waypoints.points.size();
  if (m < 2) throw std::invalid_argument("fit_min_acceleration_path: need both endpoints");
  if (basis_size < m)
    throw std::invalid_argument("fit_min_acceleration_path: basis too small for the waypoints");

  const Matrix gram = acceleration_gram(basis_size);
  const std::size_t n = basis_size + m;

  Matrix kkt(n, n);
  for (std::size_t j = 0; j < basis_size; ++j)
    for (std::size_t k = 0; k < basis_size; ++k) kkt(j, k) = gram(j, k);
  for (std::size_t l = 0; l < m; ++l) {
    double power = 1.0;
    for (std::size_t j = 0; j < basis_size; ++j) {
      kkt(basis_size + l, j) = power;
      kkt(j, basis_size + l) = power;
      power *= waypoints.times[l];
    }
  }

  PolynomialPath path;
  path.dimension = waypoints.dimension;
  path.basis_size = basis_size;
  path.horizon = waypoints.horizon;
  path.coefficients.assign(waypoints.dimension * basis_size, 0.0);

  for (std::size_t component = 0; component < waypoints.dimension; ++component) {
    Vec rhs(n);
    for (std::size_t l = 0; l < m; ++l) rhs[basis_size + l] = waypoints.points[l][component];
    const Vec solution = solve_full_pivot(kkt, rhs);
    for (std::size_t j = 0; j < basis_size; ++j)
      path.coefficients[component * basis_size + j] = solution[j];
  }
  return path;
}

double path_energy(const PolynomialPath& path) {
  const Matrix gram = acceleration_gram(path.basis_size);
  double energy = 0.0;
  for (std::size_t component = 0; component < path.dimension; ++component) {
    Vec coef(path.basis_size);
    for (std::size_t j = 0; j < path.basis_size; ++j) coef[j] = path.coefficient(component, j);
    energy += dot(coef, gram.apply(coef));
  }
  return energy;
}

namespace {

struct SwitchWeight {
  double value = 0.0;
  double rate = 0.0;
};

SwitchWeight switch_weight(double switch_rate, double switch_time, double t) {
  const double u = switch_rate * (t - switch_time);
  const double logistic =
      u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
  return {1.0 - logistic, -switch_rate * logistic * (1.0 - logistic)};
}

}  // namespace

TrackingProblem switching_objective(const PolynomialPath& first, const PolynomialPath& second,
                                    double switch_time, double switch_rate) {
  if (first.dimension != second.dimension || first.horizon != second.horizon)
    throw std::invalid_argument("switching_objective: paths must share dimension and horizon");
  const auto y1 = std::make_shared<const PolynomialPath>(first);
  const auto y2 = std::make_shared<const PolynomialPath>(second);
  const std::size_t n = first.dimension;

  TimeVaryingScalarField objective;
  objective.dimension = n;
  objective.value = [y1, y2, switch_time, switch_rate](const Vec& x, double t) {
    const double w = switch_weight(switch_rate, switch_time, t).value;
    const Vec d1 = x - y1->position(t);
    const Vec d2 = x - y2->position(t);
    return w * dot(d1, d1) + (1.0 - w) * dot(d2, d2);
  };
  objective.gradient = [y1, y2, switch_time, switch_rate](const Vec& x, double t) {
    const double w = switch_weight(switch_rate, switch_time, t).value;
    Vec g = 2.0 * w * (x - y1->position(t));
    axpy(g, 2.0 * (1.0 - w), x - y2->position(t));
    return g;
  };
  objective.hessian = [n](const Vec&, double) {
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) h(i, i) = 2.0;
    return h;
  };
  objective.time_cross = [y1, y2, switch_time, switch_rate](const Vec&, double t) {
    const SwitchWeight w = switch_weight(switch_rate, switch_time, t);
    Vec out = 2.0 * w.rate * (y2->position(t) - y1->position(t));
    axpy(out, -2.0 * w.value, y1->velocity(t));
    axpy(out, -2.0 * (1.0 - w.value), y2->velocity(t));
    return out;
  };
  objective.time_partial = [y1, y2, switch_time, switch_rate](const Vec& x, double t) {
    const SwitchWeight w = switch_weight(switch_rate, switch_time, t);
    const Vec d1 = x - y1->position(t);
    const Vec d2 = x - y2->position(t);
    return w.rate * dot(d1, d1) - 2.0 * w.value * dot(d1, y1->velocity(t)) -
           w.rate * dot(d2, d2) - 2.0 * (1.0 - w.value) * dot(d2, y2->velocity(t));
  };

  TrackingProblem problem;
  problem.objective = std::move(objective);
  problem.strong_convexity = 2.0;
  return problem;
}

namespace {

// Squared distance to one moving target on one coordinate block.
TimeVaryingScalarField proximity_constraint(std::shared_ptr<const PolynomialPath> target,
                                            std::size_t block, std::size_t block_size,
                                            std::size_t dimension, double radius) {
  TimeVaryingScalarField field;
  field.dimension = dimension;
  const std::size_t offset = block * block_size;

  auto displacement = [target, offset, block_size](const Vec& x, double t) {
    const Vec y = target->position(t);
    Vec d(block_size);
    for (std::size_t i = 0; i < block_size; ++i) d[i] = x[offset + i] - y[i];
    return d;
  };

  field.value = [displacement, radius](const Vec& x, double t) {
    const Vec d = displacement(x, t);
    return dot(d, d) - radius * radius;
  };
  field.gradient = [displacement, offset, block_size, dimension](const Vec& x, double t) {
    const Vec d = displacement(x, t);
    Vec g(dimension);
    for (std::size_t i = 0; i < block_size; ++i) g[offset + i] = 2.0 * d[i];
    return g;
  };
  field.hessian = [offset, block_size, dimension](const Vec&, double) {
    Matrix h(dimension, dimension);
    for (std::size_t i = 0; i < block_size; ++i) h(offset + i, offset + i) = 2.0;
    return h;
  };
  field.time_cross = [target, offset, block_size, dimension](const Vec&, double t) {
    const Vec rate = target->velocity(t);
    Vec out(dimension);
    for (std::size_t i = 0; i < block_size; ++i) out[offset + i] = -2.0 * rate[i];
    return out;
  };
  field.time_partial = [displacement, target](const Vec& x, double t) {
    return -2.0 * dot(displacement(x, t), target->velocity(t));
  };
  return field;
}

// Smallest eigenvalue of a symmetric positive definite matrix via
// bisection on shifted Cholesky probes.
double smallest_eigenvalue(const Matrix& m) {
  if (!is_positive_definite(m)) return 0.0;
  double lo = 0.0;
  double hi = m.trace();
  for (int iter = 0; iter < 80 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    Matrix shifted = m;
    shifted.add_scaled_identity(-mid);
    if (is_positive_definite(shifted))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

TrackingProblem two_agent_problem(const PolynomialPath& first, const PolynomialPath& second,
                                  double radius) {
  if (first.dimension != 2 || second.dimension != 2)
    throw std::invalid_argument("two_agent_problem: expects planar paths");
  if (!(radius > 0.0)) throw std::invalid_argument("two_agent_problem: radius must be positive");
  const std::size_t n = 4;
  const auto y1 = std::make_shared<const PolynomialPath>(first);
  const auto y2 = std::make_shared<const PolynomialPath>(second);

  // mutual squared distance between the two agent blocks; time-invariant
  TimeVaryingScalarField objective;
  objective.dimension = n;
  objective.value = [](const Vec& x, double) {
    const double dx = x[0] - x[2];
    const double dy = x[1] - x[3];
    return dx * dx + dy * dy;
  };
  objective.gradient = [n](const Vec& x, double) {
    Vec g(n);
    g[0] = 2.0 * (x[0] - x[2]);
    g[1] = 2.0 * (x[1] - x[3]);
    g[2] = -g[0];
    g[3] = -g[1];
    return g;
  };
  objective.hessian = [n](const Vec&, double) {
    Matrix h(n, n);
    h(0, 0) = h(1, 1) = h(2, 2) = h(3, 3) = 2.0;
    h(0, 2) = h(2, 0) = h(1, 3) = h(3, 1) = -2.0;
    return h;
  };
  objective.time_cross = [n](const Vec&, double) { return Vec(n); };
  objective.time_partial = [](const Vec&, double) { return 0.0; };

  TrackingProblem problem;
  problem.objective = std::move(objective);
  problem.constraints.push_back(proximity_constraint(y1, 0, 2, n, radius));
  problem.constraints.push_back(proximity_constraint(y2, 1, 2, n, radius));

  // The objective alone is only positive semidefinite; declare curvature
  // from the barrier Hessian sampled over a strictly feasible tube at
  // t = 0. Metadata for bound reporting, never used by the dynamics.
  {
    TrackingProblem probe = problem;
    probe.strong_convexity = 1.0;
    const BarrierField barrier(probe, ScheduleParams{1.0, 6.0, 0.0, 10.0});
    std::mt19937_64 engine(20250810ull);
    double least = std::numeric_limits<double>::infinity();
    const Vec base1 = y1->position(0.0);
    const Vec base2 = y2->position(0.0);
    for (int sample = 0; sample < 64; ++sample) {
      Vec x(n);
      for (std::size_t block = 0; block < 2; ++block) {
        const Vec& base = block == 0 ? base1 : base2;
        const double angle = 2.0 * 3.14159265358979323846 * uniform_unit(engine);
        const double rho = 0.8 * radius * std::sqrt(uniform_unit(engine));
        x[2 * block] = base[0] + rho * std::cos(angle);
        x[2 * block + 1] = base[1] + rho * std::sin(angle);
      }
      least = std::min(least, smallest_eigenvalue(barrier.hessian(x, 0.0)));
    }
    problem.strong_convexity = std::max(least, 1e-12);
  }

  return problem;
}

}  // namespace tvopt
