#include "tvopt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "tvopt/errors.hpp"

namespace tvopt {

namespace {

double relative_entry_error(double analytic, double reference, double scale) {
  return std::abs(analytic - reference) / scale;
}

double error_scale(double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

DerivativeReport validate_derivatives(const TimeVaryingScalarField& field, const Vec& x, double t,
                                      double h, double tol) {
  if (!(h > 0.0)) throw std::invalid_argument("validate_derivatives: h must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("validate_derivatives: tol must be positive");
  const std::size_t n = field.dimension;

  DerivativeReport report;

  // gradient vs central difference of the value
  {
    const Vec grad = field.gradient(x, t);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Vec hi = x;
      Vec lo = x;
      hi[i] += h;
      lo[i] -= h;
      const double fd = (field.value(hi, t) - field.value(lo, t)) / (2.0 * h);
      worst = std::max(worst, relative_entry_error(grad[i], fd, error_scale(grad[i], fd)));
    }
    report.gradient = {worst, worst <= tol};
  }

  // hessian vs central difference of the gradient
  {
    const Matrix hess = field.hessian(x, t);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      Vec hi = x;
      Vec lo = x;
      hi[j] += h;
      lo[j] -= h;
      const Vec ghi = field.gradient(hi, t);
      const Vec glo = field.gradient(lo, t);
      for (std::size_t i = 0; i < n; ++i) {
        const double fd = (ghi[i] - glo[i]) / (2.0 * h);
        worst = std::max(worst, relative_entry_error(hess(i, j), fd, error_scale(hess(i, j), fd)));
      }
    }
    report.hessian = {worst, worst <= tol};
  }

  // time cross term vs central difference of the gradient in t
  {
    const Vec cross = field.time_cross(x, t);
    const Vec ghi = field.gradient(x, t + h);
    const Vec glo = field.gradient(x, t - h);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fd = (ghi[i] - glo[i]) / (2.0 * h);
      worst = std::max(worst, relative_entry_error(cross[i], fd, error_scale(cross[i], fd)));
    }
    report.time_cross = {worst, worst <= tol};
  }

  // time partial vs central difference of the value in t
  {
    const double partial = field.time_partial(x, t);
    const double fd = (field.value(x, t + h) - field.value(x, t - h)) / (2.0 * h);
    const double worst = relative_entry_error(partial, fd, error_scale(partial, fd));
    report.time_partial = {worst, worst <= tol};
  }

  return report;
}

TimeVaryingScalarField lagrangian_field(const TrackingProblem& problem) {
  if (!problem.equality)
    throw MissingEqualitySystem("lagrangian_field: problem has no equality system");
  if (!problem.constraints.empty())
    throw std::invalid_argument("lagrangian_field: inequality constraints are not supported here");

  const auto shared = std::make_shared<const TrackingProblem>(problem);
  const std::size_t n = shared->dimension();
  const std::size_t p = shared->equality->count;

  auto split_point = [n](const Vec& z) {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i];
    return x;
  };
  auto split_multipliers = [n, p](const Vec& z) {
    Vec m(p);
    for (std::size_t i = 0; i < p; ++i) m[i] = z[n + i];
    return m;
  };

  TimeVaryingScalarField field;
  field.dimension = n + p;

  field.value = [shared, split_point, split_multipliers](const Vec& z, double t) {
    const Vec x = split_point(z);
    const Vec m = split_multipliers(z);
    const auto& eq = *shared->equality;
    const Vec residual = eq.matrix(t).apply(x) - eq.offset(t);
    return shared->objective.value(x, t) + dot(m, residual);
  };

  field.gradient = [shared, n, p, split_point, split_multipliers](const Vec& z, double t) {
    const Vec x = split_point(z);
    const Vec m = split_multipliers(z);
    const auto& eq = *shared->equality;
    const Matrix a = eq.matrix(t);
    Vec gx = shared->objective.gradient(x, t) + a.apply_transpose(m);
    const Vec residual = a.apply(x) - eq.offset(t);
    Vec g(n + p);
    for (std::size_t i = 0; i < n; ++i) g[i] = gx[i];
    for (std::size_t i = 0; i < p; ++i) g[n + i] = residual[i];
    return g;
  };

  field.hessian = [shared, n, p, split_point](const Vec& z, double t) {
    const Vec x = split_point(z);
    const Matrix a = shared->equality->matrix(t);
    const Matrix hxx = shared->objective.hessian(x, t);
    Matrix h(n + p, n + p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) h(i, j) = hxx(i, j);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        h(n + r, c) = a(r, c);
        h(c, n + r) = a(r, c);
      }
    // multiplier-multiplier block is exactly zero
    return h;
  };

  field.time_cross = [shared, n, p, split_point, split_multipliers](const Vec& z, double t) {
    const Vec x = split_point(z);
    const Vec m = split_multipliers(z);
    const auto& eq = *shared->equality;
    const Matrix a_rate = eq.matrix_rate(t);
    Vec cx = shared->objective.time_cross(x, t) + a_rate.apply_transpose(m);
    const Vec residual_rate = a_rate.apply(x) - eq.offset_rate(t);
    Vec c(n + p);
    for (std::size_t i = 0; i < n; ++i) c[i] = cx[i];
    for (std::size_t i = 0; i < p; ++i) c[n + i] = residual_rate[i];
    return c;
  };

  field.time_partial = [shared, split_point, split_multipliers](const Vec& z, double t) {
    const Vec x = split_point(z);
    const Vec m = split_multipliers(z);
    const auto& eq = *shared->equality;
    const Vec residual_rate = eq.matrix_rate(t).apply(x) - eq.offset_rate(t);
    return shared->objective.time_partial(x, t) + dot(m, residual_rate);
  };

  return field;
}

}  // namespace tvopt
