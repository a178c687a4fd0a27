#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "mdp_dissip/errors.hpp"

namespace mdp_dissip {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Small and value-semantic; every routine
// in this library works at desk scale, so no view machinery or allocators.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InputError("matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InputError("matrix add: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InputError("matrix subtract: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InputError("matrix multiply: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Vector operator*(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size()) throw InputError("matrix-vector multiply: shape mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

inline double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw InputError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double trace(const Matrix& a) {
  if (!a.square()) throw InputError("trace: matrix not square");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

// (a + a^T)/2, useful to kill round-off drift in products that are
// symmetric in exact arithmetic.
inline Matrix symmetrize(const Matrix& a) {
  if (!a.square()) throw InputError("symmetrize: matrix not square");
  Matrix s(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

// Symmetric matrix. Construction rejects visible asymmetry and then stores
// the exactly symmetrized entries so downstream spectral code never sees a
// stray round-off asymmetry.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& a) {
    if (!a.square()) throw InputError("symmetric matrix: not square");
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = i + 1; j < a.rows(); ++j)
        if (std::abs(a(i, j) - a(j, i)) > 1e-12)
          throw DomainError("symmetric matrix: asymmetry above 1e-12 at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
    m_ = symmetrize(a);
  }

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

inline double quadratic_form(const SymMatrix& s, const Vector& x) {
  return dot(x, s.matrix() * x);
}

}  // namespace mdp_dissip
