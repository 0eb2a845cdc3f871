#pragma once

// Shared helpers for the test suites. The matrix oracles here are written as
// naive triple loops on purpose: they must stay independent of the library's
// own kernels so reconstruction/identity checks carry evidential weight.

#include <cmath>
#include <cstddef>
#include <vector>

#include "eigenparity/linalg.hpp"
#include "eigenparity/rng.hpp"

namespace test_util {

using eigenparity::Matrix;
using eigenparity::Rng;
using eigenparity::SymMatrix;
using eigenparity::Vector;

inline Matrix oracle_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

// U diag(lam) U^T assembled element by element, independent of the library.
inline Matrix oracle_reconstruct(const std::vector<double>& lam, const Matrix& u) {
  const std::size_t n = lam.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += lam[a] * u(i, a) * u(j, a);
      m(i, j) = s;
    }
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline Matrix random_symmetric(std::size_t n, Rng& rng, double scale = 1.0) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = scale * rng.gaussian();
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

// SPD with eigenvalues uniform in [lo, hi] and a Haar-random eigenbasis.
inline SymMatrix random_spd(std::size_t n, Rng& rng, double lo = 0.1, double hi = 2.0) {
  const auto rot = eigenparity::random_rotation(n, rng.next_u64());
  std::vector<double> lam(n);
  for (auto& v : lam) v = rng.uniform(lo, hi);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += lam[a] * rot(i, a) * rot(j, a);
      m(i, j) = s;
    }
  // Exact symmetrization; the SymMatrix constructor checks the rest.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  return SymMatrix(std::move(m));
}

// Random correlation matrix: SPD, rescaled to an exactly unit diagonal.
inline SymMatrix random_correlation(std::size_t n, Rng& rng, double lo = 0.1, double hi = 2.0) {
  const SymMatrix spd = random_spd(n, rng, lo, hi);
  Matrix m = spd.mat();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = std::sqrt(m(i, i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) /= d[i] * d[j];
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  return SymMatrix(std::move(m));
}

// Givens rotation in plane (k, l); the generator basis for the gradient
// checks on the rotation group.
inline Matrix givens(std::size_t n, std::size_t k, std::size_t l, double theta) {
  Matrix r = Matrix::identity(n);
  r(k, k) = std::cos(theta);
  r(l, l) = std::cos(theta);
  r(k, l) = -std::sin(theta);
  r(l, k) = std::sin(theta);
  return r;
}

}  // namespace test_util
