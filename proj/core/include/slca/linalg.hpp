#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "slca/rng.hpp"

namespace slca {

/// Dense real vector. Storage is always 64-bit.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double value = 0.0) : data_(n, value) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}
  explicit Vector(std::span<const double> values) : data_(values.begin(), values.end()) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  operator std::span<double>() noexcept { return data_; }
  operator std::span<const double>() const noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  std::span<double> span() noexcept { return data_; }

  const std::vector<double>& values() const noexcept { return data_; }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
bool all_finite(std::span<const double> a);

Matrix transpose(const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);
/// m * x
Vector matvec(const Matrix& m, std::span<const double> x);
double frobenius_norm(const Matrix& m);
double trace(const Matrix& m);

/// Lower-triangular L with L * L^T = m + jitter * I.
/// Throws NotPositiveDefinite when a pivot is not strictly positive.
Matrix cholesky(const Matrix& m, double jitter = 0.0);

/// Cholesky factor with jitter escalation: start at 1e-6 * trace/d and grow
/// by 10x up to 1e-2 * trace/d. An all-zero matrix yields an all-zero factor.
Matrix cholesky_jittered(const Matrix& m);

/// Standard normal variate.
double gaussian_scalar(Rng& rng);

/// `count` draws of mean + L * z with z ~ N(0, I).
std::vector<Vector> sample_mvn(const Vector& mean, const Matrix& chol_cov, std::size_t count,
                               Rng& rng);

}  // namespace slca
