#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace tasep::la {

struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
  double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Matrix matmul(const Matrix& x, const Matrix& y) {
  Matrix z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      const double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) z(i, j) += xik * y(k, j);
    }
  return z;
}

// det via LU with partial pivoting, accumulated as sign + log-modulus so huge
// or tiny determinants do not overflow mid-factorization. Consumes its copy.
inline double det_lu(Matrix m) {
  if (m.rows != m.cols) throw ValidationError("det_lu: matrix not square");
  const int n = m.rows;
  double sign = 1.0, logmod = 0.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      sign = -sign;
    }
    const double pivot = m(k, k);
    if (pivot < 0.0) sign = -sign;
    logmod += std::log(std::abs(pivot));
    for (int i = k + 1; i < n; ++i) {
      const double f = m(i, k) / pivot;
      if (f == 0.0) continue;
      for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return sign * std::exp(logmod);
}

inline double det_one_minus(const Matrix& m) {
  if (m.rows != m.cols) throw ValidationError("det_one_minus: matrix not square");
  Matrix b(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) b(i, j) = (i == j ? 1.0 : 0.0) - m(i, j);
  return det_lu(std::move(b));
}

}  // namespace tasep::la
