#pragma once

// Dense row-major matrices, partial-pivoted LU, and the dense nonsymmetric
// eigensolver (balancing, Hessenberg reduction, Francis double-shift QR).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace metaspec {

using complex = std::complex<double>;

template <class T>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Dense identity(std::size_t n) {
    Dense m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Matrix = Dense<double>;
using CMatrix = Dense<complex>;

/// Maximum absolute row sum.
double norm_inf(const Matrix& a);
/// Frobenius norm.
double norm_fro(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, std::span<const double> x);
std::vector<complex> multiply(const Matrix& a, std::span<const complex> x);
CMatrix to_complex(const Matrix& a);

/// Determinant as sign (or unit phase) times exp(log_abs); log_abs = -inf for
/// a singular matrix.
template <class T>
struct LogDet {
  T phase;
  double log_abs;
};

/// PA = LU with row partial pivoting, L unit lower, both stored in `lu`.
template <class T>
class Lu {
 public:
  explicit Lu(Dense<T> a);

  std::size_t size() const { return lu_.rows(); }
  /// True if some pivot was exactly zero.
  bool singular() const { return singular_; }
  /// Smallest |pivot| / largest |pivot|.
  double pivot_ratio() const;
  LogDet<T> logdet() const;
  std::vector<T> solve(std::span<const T> b) const;
  /// Replaces exactly-zero pivots by `value` so that solves stay finite
  /// (used by inverse iteration, where A - lambda I is singular by design).
  void replace_zero_pivots(double value);

 private:
  Dense<T> lu_;
  std::vector<std::size_t> perm_;
  int swaps_ = 0;
  bool singular_ = false;
};

extern template class Lu<double>;
extern template class Lu<complex>;

/// Solves A x = b; throws StructuralError if A is singular.
std::vector<double> solve(const Matrix& a, std::span<const double> b);
/// Solves A X = B column by column against one factorization.
Matrix solve(const Matrix& a, const Matrix& b);

template <class T>
LogDet<T> logdet(const Dense<T>& a) {
  return Lu<T>(a).logdet();
}

// Eigensolver pieces, exposed for testing.

/// Permutes and scales a in place (powers of two) so that row and column
/// norms are comparable. Eigenvalues are unchanged.
void balance(Matrix& a);
/// Householder reduction to upper Hessenberg form in place.
void hessenberg(Matrix& a);
/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
/// Throws NumericError naming the subdiagonal that failed to deflate.
std::vector<complex> hessenberg_eigenvalues(Matrix h);

/// All eigenvalues of a square matrix. Complex eigenvalues come in exact
/// conjugate pairs. Order follows the QR deflation order.
std::vector<complex> eigenvalues(const Matrix& a);

/// Right eigenvector for an approximate eigenvalue by inverse iteration on
/// A - lambda I. The result has unit infinity norm. Throws NumericError if the
/// residual |A v - lambda v| <= tol |A| |v| is not reached in 50 iterations.
std::vector<complex> inverse_iteration(const Matrix& a, complex lambda, double tol = 1e-10);

}  // namespace metaspec
