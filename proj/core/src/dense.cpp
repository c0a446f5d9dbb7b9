#include "tvopt/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "tvopt/errors.hpp"

namespace tvopt {

Vec& Vec::operator+=(const Vec& other) {
  assert(size() == other.size());
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& other) {
  assert(size() == other.size());
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vec& Vec::operator*=(double factor) {
  for (double& v : data_) v *= factor;
  return *this;
}

double Vec::norm() const {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return std::sqrt(sum);
}

double Vec::max_abs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

Vec operator+(Vec a, const Vec& b) {
  a += b;
  return a;
}

Vec operator-(Vec a, const Vec& b) {
  a -= b;
  return a;
}

Vec operator-(Vec a) {
  a *= -1.0;
  return a;
}

Vec operator*(double factor, Vec a) {
  a *= factor;
  return a;
}

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(Vec& y, double factor, const Vec& x) {
  assert(y.size() == x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += factor * x[i];
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Matrix::apply(const Vec& x) const {
  assert(x.size() == cols_);
  Vec y(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) sum += entries_[r * cols_ + c] * x[c];
    y[r] = sum;
  }
  return y;
}

Vec Matrix::apply_transpose(const Vec& x) const {
  assert(x.size() == rows_);
  Vec y(cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double xr = x[r];
    for (std::size_t c = 0; c < cols_; ++c) y[c] += entries_[r * cols_ + c] * xr;
  }
  return y;
}

double Matrix::max_abs() const {
  double best = 0.0;
  for (double v : entries_) best = std::max(best, std::abs(v));
  return best;
}

double Matrix::trace() const {
  const std::size_t n = std::min(rows_, cols_);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += (*this)(i, i);
  return sum;
}

double Matrix::symmetry_gap() const {
  const std::size_t n = std::min(rows_, cols_);
  double gap = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      gap = std::max(gap, std::abs((*this)(i, j) - (*this)(j, i)));
  return gap;
}

void Matrix::add_scaled_identity(double factor) {
  const std::size_t n = std::min(rows_, cols_);
  for (std::size_t i = 0; i < n; ++i) (*this)(i, i) += factor;
}

void Matrix::add_scaled(const Matrix& other, double factor) {
  assert(rows_ == other.rows_ && cols_ == other.cols_);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += factor * other.entries_[i];
}

void Matrix::add_outer_product(const Vec& v, double factor) {
  assert(rows_ == v.size() && cols_ == v.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    const double vr = factor * v[r];
    for (std::size_t c = 0; c < cols_; ++c) entries_[r * cols_ + c] += vr * v[c];
  }
}

namespace {

void check_symmetric_system(const Matrix& a, const Vec& b, const char* who) {
  if (!a.square()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
  if (a.rows() != b.size()) throw std::invalid_argument(std::string(who) + ": shape mismatch");
  const double scale = a.max_abs();
  if (a.symmetry_gap() > 1e-10 * std::max(scale, 1e-300))
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

// In-place lower Cholesky; returns false on a nonpositive (or NaN) pivot.
bool cholesky_lower(Matrix& m) {
  const std::size_t n = m.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t c = 0; c < j; ++c) d -= m(j, c) * m(j, c);
    if (!(d > 0.0)) return false;
    const double root = std::sqrt(d);
    m(j, j) = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double sum = m(i, j);
      for (std::size_t c = 0; c < j; ++c) sum -= m(i, c) * m(j, c);
      m(i, j) = sum / root;
    }
  }
  return true;
}

constexpr double kBunchKaufmanAlpha = 0.6403882032022076;  // (1 + sqrt(17)) / 8

// Bunch-Kaufman LDL^T of the lower triangle of `w`, in place.
// pivots[k] >= 0 encodes a 1x1 block with rows/cols k <-> pivots[k] swapped;
// pivots[k] = pivots[k+1] = -(r+1) encodes a 2x2 block at (k, k+1) with
// rows/cols k+1 <-> r swapped. Interchanges touch only the trailing
// submatrix, so the solve must interleave the swaps in the same order.
void factor_bunch_kaufman(Matrix& w, std::vector<int>& pivots, double tiny) {
  const std::size_t n = w.rows();
  pivots.assign(n, 0);

  auto lo = [&w](std::size_t i, std::size_t j) -> double& {
    return i >= j ? w(i, j) : w(j, i);
  };

  auto swap_trailing = [&](std::size_t k, std::size_t a, std::size_t b) {
    // symmetric interchange of rows/cols a and b within the submatrix [k, n)
    if (a == b) return;
    if (a > b) std::swap(a, b);
    for (std::size_t j = k; j < n; ++j) {
      if (j == a || j == b) continue;
      std::swap(lo(j, a), lo(j, b));
    }
    std::swap(lo(a, a), lo(b, b));
  };

  std::size_t k = 0;
  while (k < n) {
    const double absakk = std::abs(lo(k, k));
    std::size_t imax = k;
    double colmax = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lo(i, k));
      if (v > colmax) {
        colmax = v;
        imax = i;
      }
    }
    if (std::max(absakk, colmax) <= tiny)
      throw Singular("solve_symmetric_indefinite: rank deficient (zero pivot column)");

    std::size_t kstep = 1;
    std::size_t kp = k;
    if (absakk < kBunchKaufmanAlpha * colmax) {
      double rowmax = 0.0;
      for (std::size_t j = k; j < n; ++j) {
        if (j == imax) continue;
        rowmax = std::max(rowmax, std::abs(lo(imax, j)));
      }
      if (absakk * rowmax >= kBunchKaufmanAlpha * colmax * colmax) {
        kstep = 1;
        kp = k;
      } else if (std::abs(lo(imax, imax)) >= kBunchKaufmanAlpha * rowmax) {
        kstep = 1;
        kp = imax;
      } else {
        kstep = 2;
        kp = imax;
      }
    }

    if (kstep == 1) {
      swap_trailing(k, k, kp);
      pivots[k] = static_cast<int>(kp);
      const double d = lo(k, k);
      if (std::abs(d) <= tiny)
        throw Singular("solve_symmetric_indefinite: rank deficient (1x1 pivot)");
      // update trailing submatrix column by column, then store multipliers
      for (std::size_t j = k + 1; j < n; ++j) {
        const double mult = lo(j, k) / d;
        for (std::size_t i = j; i < n; ++i) lo(i, j) -= lo(i, k) * mult;
        lo(j, k) = mult;
      }
      k += 1;
    } else {
      swap_trailing(k, k + 1, kp);
      pivots[k] = -(static_cast<int>(kp) + 1);
      pivots[k + 1] = pivots[k];
      const double d11 = lo(k, k);
      const double d21 = lo(k + 1, k);
      const double d22 = lo(k + 1, k + 1);
      const double det = d11 * d22 - d21 * d21;
      if (std::abs(det) <= tiny * tiny)
        throw Singular("solve_symmetric_indefinite: rank deficient (2x2 pivot)");
      for (std::size_t j = k + 2; j < n; ++j) {
        const double w1 = lo(j, k);
        const double w2 = lo(j, k + 1);
        const double m1 = (d22 * w1 - d21 * w2) / det;
        const double m2 = (d11 * w2 - d21 * w1) / det;
        for (std::size_t i = j; i < n; ++i) lo(i, j) -= lo(i, k) * m1 + lo(i, k + 1) * m2;
        lo(j, k) = m1;
        lo(j, k + 1) = m2;
      }
      k += 2;
    }
  }
}

void solve_bunch_kaufman(const Matrix& w, const std::vector<int>& pivots, Vec& x) {
  const std::size_t n = w.rows();
  auto lo = [&w](std::size_t i, std::size_t j) -> double {
    return i >= j ? w(i, j) : w(j, i);
  };

  // forward pass: interleaved swaps, unit-lower solve, block-diagonal solve
  std::size_t k = 0;
  while (k < n) {
    if (pivots[k] >= 0) {
      const auto kp = static_cast<std::size_t>(pivots[k]);
      if (kp != k) std::swap(x[k], x[kp]);
      const double xk = x[k];
      for (std::size_t i = k + 1; i < n; ++i) x[i] -= lo(i, k) * xk;
      x[k] = xk / lo(k, k);
      k += 1;
    } else {
      const auto kp = static_cast<std::size_t>(-pivots[k] - 1);
      if (kp != k + 1) std::swap(x[k + 1], x[kp]);
      const double xk = x[k];
      const double xk1 = x[k + 1];
      for (std::size_t i = k + 2; i < n; ++i) x[i] -= lo(i, k) * xk + lo(i, k + 1) * xk1;
      const double d11 = lo(k, k);
      const double d21 = lo(k + 1, k);
      const double d22 = lo(k + 1, k + 1);
      const double det = d11 * d22 - d21 * d21;
      x[k] = (d22 * xk - d21 * xk1) / det;
      x[k + 1] = (d11 * xk1 - d21 * xk) / det;
      k += 2;
    }
  }

  // backward pass: unit-lower transpose solve with swaps reversed
  std::size_t pos = n;
  while (pos > 0) {
    const std::size_t kk = pos - 1;
    if (pivots[kk] >= 0) {
      double sum = x[kk];
      for (std::size_t i = kk + 1; i < n; ++i) sum -= lo(i, kk) * x[i];
      x[kk] = sum;
      const auto kp = static_cast<std::size_t>(pivots[kk]);
      if (kp != kk) std::swap(x[kk], x[kp]);
      pos -= 1;
    } else {
      const std::size_t kb = kk - 1;  // block occupies (kb, kk)
      double sum0 = x[kb];
      double sum1 = x[kk];
      for (std::size_t i = kk + 1; i < n; ++i) {
        sum0 -= lo(i, kb) * x[i];
        sum1 -= lo(i, kk) * x[i];
      }
      x[kb] = sum0;
      x[kk] = sum1;
      const auto kp = static_cast<std::size_t>(-pivots[kk] - 1);
      if (kp != kk) std::swap(x[kk], x[kp]);
      pos -= 2;
    }
  }
}

}  // namespace

Vec solve_spd(const Matrix& a, const Vec& b) {
  check_symmetric_system(a, b, "solve_spd");
  const std::size_t n = a.rows();
  Matrix factor = a;
  if (!cholesky_lower(factor))
    throw NotPositiveDefinite("solve_spd: matrix is not positive definite");

  Vec x = b;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = x[i];
    for (std::size_t j = 0; j < i; ++j) sum -= factor(i, j) * x[j];
    x[i] = sum / factor(i, i);
  }
  for (std::size_t ii = n; ii > 0; --ii) {
    const std::size_t i = ii - 1;
    double sum = x[i];
    for (std::size_t j = i + 1; j < n; ++j) sum -= factor(j, i) * x[j];
    x[i] = sum / factor(i, i);
  }
  return x;
}

Vec solve_symmetric_indefinite(const Matrix& k, const Vec& b) {
  check_symmetric_system(k, b, "solve_symmetric_indefinite");
  const std::size_t n = k.rows();
  const double scale = std::max(k.max_abs(), 1e-300);
  const double tiny = 64.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;

  Matrix factor = k;
  std::vector<int> pivots;
  factor_bunch_kaufman(factor, pivots, tiny);
  Vec x = b;
  solve_bunch_kaufman(factor, pivots, x);
  return x;
}

bool is_positive_definite(const Matrix& a) {
  if (!a.square()) return false;
  Matrix factor = a;
  return cholesky_lower(factor);
}

}  // namespace tvopt
