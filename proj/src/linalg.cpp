#include "metaspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "metaspec/error.hpp"
#include "metaspec/simd.hpp"

namespace metaspec {
namespace {

void check_square(std::size_t rows, std::size_t cols, const char* what) {
  if (rows != cols) {
    std::ostringstream os;
    os << what << ": matrix must be square, got " << rows << "x" << cols;
    throw DomainError(os.str());
  }
}

// y += a * x over contiguous storage, dispatched to the active kernels.
void row_axpy(double a, std::span<const double> x, std::span<double> y) { simd::axpy(a, x, y); }
void row_axpy(complex a, std::span<const complex> x, std::span<complex> y) { simd::zaxpy(a, x, y); }
double row_dot(std::span<const double> x, std::span<const double> y) { return simd::dot(x, y); }
complex row_dot(std::span<const complex> x, std::span<const complex> y) { return simd::zdotu(x, y); }

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }
complex sign_of(complex v) { return v / std::abs(v); }

}  // namespace

double norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) best = std::max(best, simd::asum(a.row(i)));
  return best;
}

double norm_fro(const Matrix& a) {
  return std::sqrt(simd::dot(a.data(), a.data()));
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DomainError("multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) simd::axpy(aik, b.row(k), c.row(i));
    }
  }
  return c;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DomainError("multiply: vector length differs from columns");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = simd::dot(a.row(i), x);
  return y;
}

std::vector<complex> multiply(const Matrix& a, std::span<const complex> x) {
  if (a.cols() != x.size()) throw DomainError("multiply: vector length differs from columns");
  std::vector<double> re(x.size()), im(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    re[j] = x[j].real();
    im[j] = x[j].imag();
  }
  std::vector<complex> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = {simd::dot(a.row(i), re), simd::dot(a.row(i), im)};
  return y;
}

CMatrix to_complex(const Matrix& a) {
  CMatrix c(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.data().size(); ++k) c.data()[k] = a.data()[k];
  return c;
}

template <class T>
Lu<T>::Lu(Dense<T> a) : lu_(std::move(a)) {
  check_square(lu_.rows(), lu_.cols(), "lu");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (pivot != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(pivot).begin());
      std::swap(perm_[k], perm_[pivot]);
      ++swaps_;
    }
    if (best == 0.0) {
      // The whole remaining column is zero: no elimination needed.
      singular_ = true;
      continue;
    }
    const T inv = T{1} / lu_(k, k);
    const auto pivot_tail = lu_.row(k).subspan(k + 1);
    for (std::size_t i = k + 1; i < n; ++i) {
      const T l = lu_(i, k) * inv;
      lu_(i, k) = l;
      if (l != T{}) row_axpy(-l, pivot_tail, lu_.row(i).subspan(k + 1));
    }
  }
}

template <class T>
double Lu<T>::pivot_ratio() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    const double v = std::abs(lu_(k, k));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi == 0.0 ? 0.0 : lo / hi;
}

template <class T>
LogDet<T> Lu<T>::logdet() const {
  T phase = (swaps_ % 2 == 0) ? T{1} : T{-1};
  double log_abs = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    const T u = lu_(k, k);
    if (u == T{}) return {T{}, -std::numeric_limits<double>::infinity()};
    phase *= sign_of(u);
    log_abs += std::log(std::abs(u));
  }
  return {phase, log_abs};
}

template <class T>
std::vector<T> Lu<T>::solve(std::span<const T> b) const {
  const std::size_t n = size();
  if (b.size() != n) throw DomainError("lu solve: right-hand side has wrong length");
  if (singular_) throw StructuralError("lu solve: matrix is singular");
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = b[perm_[i]] - row_dot(lu_.row(i).first(i), std::span<const T>(x).first(i));
  }
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t tail = n - i - 1;
    const T s = row_dot(lu_.row(i).subspan(i + 1, tail), std::span<const T>(x).subspan(i + 1, tail));
    x[i] = (x[i] - s) / lu_(i, i);
  }
  return x;
}

template <class T>
void Lu<T>::replace_zero_pivots(double value) {
  for (std::size_t k = 0; k < size(); ++k) {
    if (lu_(k, k) == T{}) lu_(k, k) = T{value};
  }
  singular_ = false;
}

template class Lu<double>;
template class Lu<complex>;

std::vector<double> solve(const Matrix& a, std::span<const double> b) {
  return Lu<double>(a).solve(b);
}

Matrix solve(const Matrix& a, const Matrix& b) {
  if (b.rows() != a.rows()) throw DomainError("solve: right-hand side has wrong row count");
  const Lu<double> lu(a);
  Matrix x(b.rows(), b.cols());
  std::vector<double> column(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) column[i] = b(i, j);
    const auto sol = lu.solve(column);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
  }
  return x;
}

}  // namespace metaspec
