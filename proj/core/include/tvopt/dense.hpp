#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace tvopt {

// Small dense vector with value semantics. Everything in this library is
// a few dozen entries at most, so storage is a plain contiguous buffer.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vec(std::initializer_list<double> items) : data_(items) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) {
    assert(i < data_.size());
    return data_[i];
  }
  double operator[](std::size_t i) const {
    assert(i < data_.size());
    return data_[i];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  Vec& operator+=(const Vec& other);
  Vec& operator-=(const Vec& other);
  Vec& operator*=(double factor);

  double norm() const;     // Euclidean
  double max_abs() const;  // infinity norm

 private:
  std::vector<double> data_;
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator-(Vec a);
Vec operator*(double factor, Vec a);
double dot(const Vec& a, const Vec& b);

// y += factor * x
void axpy(Vec& y, double factor, const Vec& x);

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return entries_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return entries_[r * cols_ + c];
  }

  const std::vector<double>& entries() const { return entries_; }

  Vec apply(const Vec& x) const;            // A x
  Vec apply_transpose(const Vec& x) const;  // A^T x

  double max_abs() const;
  double trace() const;
  // max |A(i,j) - A(j,i)| over the square part
  double symmetry_gap() const;

  void add_scaled_identity(double factor);
  void add_scaled(const Matrix& other, double factor);
  // A += factor * v v^T
  void add_outer_product(const Vec& v, double factor);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

// Solves A x = b for symmetric positive definite A via Cholesky.
// Throws NotPositiveDefinite when a pivot is not strictly positive and
// std::invalid_argument when A is not (numerically) symmetric or shapes
// disagree. No regularization is applied here; callers decide.
Vec solve_spd(const Matrix& a, const Vec& b);

// Solves K x = b for symmetric possibly indefinite K via Bunch-Kaufman
// LDL^T with 1x1/2x2 pivoting. Throws Singular on rank deficiency.
Vec solve_symmetric_indefinite(const Matrix& k, const Vec& b);

// Cheap probe used for validation paths (gain matrices, curvature scans).
bool is_positive_definite(const Matrix& a);

}  // namespace tvopt
