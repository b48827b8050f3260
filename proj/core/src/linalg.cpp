#include "slca/linalg.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slca/errors.hpp"

namespace slca {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionMismatch("matrix data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) {
  // Scaled to avoid overflow for large logits.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : a) {
    const double t = v / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

bool all_finite(std::span<const double> a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Vector matvec(const Matrix& m, std::span<const double> x) {
  if (m.cols() != x.size()) throw DimensionMismatch("matvec: dimension mismatch");
  Vector y(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] = dot(m.row(r), x);
  return y;
}

double frobenius_norm(const Matrix& m) { return norm(m.flat()); }

double trace(const Matrix& m) {
  if (!m.square()) throw DimensionMismatch("trace of non-square matrix");
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

Matrix cholesky(const Matrix& m, double jitter) {
  if (!m.square()) throw DimensionMismatch("cholesky: matrix is not square");
  const std::size_t n = m.rows();
  double max_abs = 0.0;
  for (double v : m.flat()) max_abs = std::max(max_abs, std::abs(v));
  const double sym_tol = 1e-8 * std::max(max_abs, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(m(i, j) - m(j, i)) > sym_tol)
        throw InvalidArgument("cholesky: matrix is not symmetric");

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j) + jitter;
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw NotPositiveDefinite("cholesky: non-positive pivot at column " + std::to_string(j));
    }
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Matrix cholesky_jittered(const Matrix& m) {
  if (!m.square()) throw DimensionMismatch("cholesky: matrix is not square");
  const std::size_t n = m.rows();
  bool all_zero = true;
  for (double v : m.flat()) all_zero = all_zero && v == 0.0;
  if (all_zero) return Matrix(n, n);

  const double mean_diag = trace(m) / static_cast<double>(n);
  if (!(mean_diag > 0.0)) throw NotPositiveDefinite("cholesky: non-positive trace");
  for (double scale = 1e-6; scale <= 1e-2 * (1.0 + 1e-9); scale *= 10.0) {
    try {
      return cholesky(m, scale * mean_diag);
    } catch (const NotPositiveDefinite&) {
    }
  }
  throw NotPositiveDefinite("cholesky: factorization failed after jitter escalation to 1e-2 * trace/d");
}

double gaussian_scalar(Rng& rng) {
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<Vector> sample_mvn(const Vector& mean, const Matrix& chol_cov, std::size_t count,
                               Rng& rng) {
  const std::size_t d = mean.size();
  if (chol_cov.rows() != d || chol_cov.cols() != d) {
    throw DimensionMismatch("sample_mvn: factor is " + std::to_string(chol_cov.rows()) + "x" +
                            std::to_string(chol_cov.cols()) + ", mean has dimension " +
                            std::to_string(d));
  }
  std::vector<Vector> out;
  out.reserve(count);
  Vector z(d);
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t i = 0; i < d; ++i) z[i] = gaussian_scalar(rng);
    Vector x(d);
    for (std::size_t i = 0; i < d; ++i) {
      double v = mean[i];
      const auto l_row = chol_cov.row(i);
      for (std::size_t j = 0; j <= i; ++j) v += l_row[j] * z[j];
      x[i] = v;
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace slca
