#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eigenparity/errors.hpp"
#include "eigenparity/rng.hpp"

namespace eigenparity {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Value semantics throughout; sized for
/// desk-scale problems (N up to a few thousand), not for sparse or huge work.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw numeric_error("matrix product: inner dimensions differ");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols_ != x.size()) throw numeric_error("matrix-vector product: dimensions differ");
    Vector y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw numeric_error("matrix difference: shapes differ");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw numeric_error("matrix sum: shapes differ");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }

  friend Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.data_) v *= s;
    return c;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double trace(const Matrix& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
  return t;
}

/// Symmetric matrix with checked construction. Input must be symmetric to
/// 1e-12 relative tolerance and finite; entries are exactly symmetrized on
/// construction so downstream kernels can assume a_ij == a_ji bitwise.
class SymMatrix {
 public:
  static constexpr double kSymTol = 1e-12;

  explicit SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw numeric_error("SymMatrix: matrix is not square");
    if (!m_.all_finite()) throw numeric_error("SymMatrix: non-finite entry");
    const double scale = std::max(m_.max_abs(), 1e-300);
    for (std::size_t i = 0; i < m_.rows(); ++i)
      for (std::size_t j = i + 1; j < m_.cols(); ++j) {
        if (std::abs(m_(i, j) - m_(j, i)) > kSymTol * scale) {
          std::ostringstream os;
          os << "SymMatrix: asymmetry at (" << i << "," << j << "): " << m_(i, j) << " vs " << m_(j, i);
          throw numeric_error(os.str());
        }
        const double avg = 0.5 * (m_(i, j) + m_(j, i));
        m_(i, j) = avg;
        m_(j, i) = avg;
      }
  }

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& mat() const { return m_; }

 private:
  Matrix m_;
};

/// Eigenpairs of a symmetric matrix. Eigenvalues sorted descending; column a
/// of `eigenvectors` holds the unit eigenvector for eigenvalues[a], signed so
/// its first nonzero component is positive. The fixed ordering and sign make
/// repeated runs bit-identical.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  std::size_t dim() const { return eigenvalues.size(); }

  Vector eigenvector(std::size_t a) const {
    Vector v(dim());
    for (std::size_t i = 0; i < dim(); ++i) v[i] = eigenvectors(i, a);
    return v;
  }

  Matrix reconstruct() const {
    const std::size_t n = dim();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a < n; ++a) s += eigenvalues[a] * eigenvectors(i, a) * eigenvectors(j, a);
        m(i, j) = s;
        m(j, i) = s;
      }
    return m;
  }
};

namespace detail {

inline void canonicalize_eigensystem(std::vector<double>& lam, Matrix& vecs) {
  const std::size_t n = lam.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lam[a] > lam[b]; });

  std::vector<double> sorted_lam(n);
  Matrix sorted_vecs(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t src = order[a];
    sorted_lam[a] = lam[src];
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(vecs(i, src)) > 1e-12) {
        sign = vecs(i, src) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) sorted_vecs(i, a) = sign * vecs(i, src);
  }
  lam = std::move(sorted_lam);
  vecs = std::move(sorted_vecs);
}

}  // namespace detail

/// Eigendecomposition by cyclic Jacobi sweeps. Convergence is declared when
/// the off-diagonal Frobenius norm drops below 1e-14 relative to the input
/// norm; the rotation budget is capped at 100 N^2 before giving up on a
/// numerically pathological input.
inline EigenDecomposition sym_eigen(const SymMatrix& m) {
  const std::size_t n = m.dim();
  Matrix a = m.mat();
  Matrix v = Matrix::identity(n);

  if (n == 0) return {{}, Matrix(0, 0)};
  if (n == 1) return {{a(0, 0)}, Matrix::identity(1)};

  const double norm = std::max(a.frobenius_norm(), 1e-300);
  const double threshold = 1e-14 * norm;
  const std::size_t max_rotations = 100 * n * n;
  std::size_t rotations = 0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  while (off_norm() > threshold) {
    std::size_t rotations_this_sweep = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        // Entries already at rounding level cannot be improved further.
        if (std::abs(apq) <= 0.5 * 2.220446049250313e-16 * (std::abs(a(p, p)) + std::abs(a(q, q)))) continue;
        ++rotations_this_sweep;
        if (++rotations > max_rotations)
          throw numeric_error("sym_eigen: Jacobi iteration cap exceeded (pathological input)");

        // Stable rotation angle (Golub & Van Loan, 8.4).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a(r, p);
            const double arq = a(r, q);
            a(r, p) = c * arp - s * arq;
            a(p, r) = a(r, p);
            a(r, q) = s * arp + c * arq;
            a(q, r) = a(r, q);
          }
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
    if (rotations_this_sweep == 0) break;  // converged to rounding level
  }

  std::vector<double> lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = a(i, i);
  detail::canonicalize_eigensystem(lam, v);
  return {std::move(lam), std::move(v)};
}

/// Smallest eigenvalue admitted before a matrix is declared non-SPD, relative
/// to the largest one. Regularization is deliberately not done here; callers
/// that want a floor apply it explicitly.
constexpr double kSpdEpsilonRel = 1e-10;

inline void ensure_spd(const EigenDecomposition& d, const char* context) {
  if (d.dim() == 0) return;
  const double lam_max = d.eigenvalues.front();
  const double lam_min = d.eigenvalues.back();
  if (!(lam_max > 0.0) || lam_min <= kSpdEpsilonRel * lam_max) {
    std::ostringstream os;
    os << context << ": matrix is not SPD (eigenvalue " << lam_min << ", largest " << lam_max << ")";
    throw numeric_error(os.str());
  }
}

/// Spectral power from an existing decomposition: sum_a lambda_a^e u_a u_a^T.
inline SymMatrix spd_power(const EigenDecomposition& d, double exponent) {
  ensure_spd(d, "spd_power");
  const std::size_t n = d.dim();
  Matrix out(n, n);
  std::vector<double> powered(n);
  for (std::size_t a = 0; a < n; ++a) powered[a] = std::pow(d.eigenvalues[a], exponent);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += powered[a] * d.eigenvectors(i, a) * d.eigenvectors(j, a);
      out(i, j) = s;
      out(j, i) = s;
    }
  return SymMatrix(std::move(out));
}

inline SymMatrix spd_power(const SymMatrix& m, double exponent) { return spd_power(sym_eigen(m), exponent); }

/// Applies the spectral power to a vector in O(N^2) without forming the
/// matrix: U diag(lambda^e) U^T x.
inline Vector spd_power_apply(const EigenDecomposition& d, double exponent, const Vector& x) {
  ensure_spd(d, "spd_power_apply");
  const std::size_t n = d.dim();
  if (x.size() != n) throw numeric_error("spd_power_apply: vector length differs from matrix dimension");
  Vector y(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += d.eigenvectors(i, a) * x[i];
    proj *= std::pow(d.eigenvalues[a], exponent);
    for (std::size_t i = 0; i < n; ++i) y[i] += d.eigenvectors(i, a) * proj;
  }
  return y;
}

/// Orthogonal matrix (proper or improper rotation), checked to 1e-10.
class RotationMatrix {
 public:
  static constexpr double kOrthoTol = 1e-10;

  explicit RotationMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw numeric_error("RotationMatrix: matrix is not square");
    const std::size_t n = m_.rows();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += m_(i, k) * m_(j, k);
        const double expected = i == j ? 1.0 : 0.0;
        if (std::abs(s - expected) > kOrthoTol)
          throw numeric_error("RotationMatrix: R R^T deviates from identity beyond tolerance");
      }
  }

  static RotationMatrix identity(std::size_t n) { return RotationMatrix(Matrix::identity(n)); }

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& mat() const { return m_; }

 private:
  Matrix m_;
};

/// Haar-distributed orthogonal matrix: QR of a seeded Gaussian matrix with
/// the R diagonal forced positive. Deterministic for a given (dim, seed);
/// covers improper rotations as well (det can be -1).
inline RotationMatrix random_rotation(std::size_t dim, std::uint64_t seed) {
  if (dim < 1) throw numeric_error("random_rotation: dim must be >= 1");
  Rng rng(seed);
  Matrix g(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.gaussian();

  // Modified Gram-Schmidt on columns; a capped redraw handles the
  // probability-zero event of a dependent column.
  Matrix q(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    Vector col(dim);
    for (std::size_t i = 0; i < dim; ++i) col[i] = g(i, j);
    for (int attempt = 0;; ++attempt) {
      Vector w = col;
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < dim; ++i) proj += q(i, k) * w[i];
        for (std::size_t i = 0; i < dim; ++i) w[i] -= proj * q(i, k);
      }
      const double norm = std::sqrt(dot(w, w));
      if (norm > 1e-12) {
        for (std::size_t i = 0; i < dim; ++i) q(i, j) = w[i] / norm;
        break;
      }
      if (attempt > 8) throw numeric_error("random_rotation: degenerate Gaussian draw");
      for (std::size_t i = 0; i < dim; ++i) col[i] = rng.gaussian();
    }
  }
  return RotationMatrix(std::move(q));
}

/// Gap d(R) - d(I) of the Mahalanobis distance between whitened and original
/// unit-variance returns, evaluated in closed form over the weight matrix
/// W = C^{weight_exponent}:
///   d_W(R) = Tr[W] + Tr[W C] - 2 Tr[R W C^{1/2}].
/// The expectation over returns is exact, so no sampling enters. The gap is
/// nonnegative for every orthogonal R and zero at R = I, for any weight
/// exponent (the default -1 is the Mahalanobis case).
inline double mahalanobis_gap(const SymMatrix& c, const RotationMatrix& r, double weight_exponent = -1.0) {
  if (c.dim() != r.dim()) throw numeric_error("mahalanobis_gap: dimension mismatch");
  const EigenDecomposition d = sym_eigen(c);
  const SymMatrix a = spd_power(d, weight_exponent + 0.5);  // W C^{1/2}
  double tr_a = 0.0;
  double tr_ra = 0.0;
  const std::size_t n = c.dim();
  for (std::size_t i = 0; i < n; ++i) {
    tr_a += a(i, i);
    for (std::size_t j = 0; j < n; ++j) tr_ra += r(i, j) * a(j, i);
  }
  return 2.0 * (tr_a - tr_ra);
}

}  // namespace eigenparity
