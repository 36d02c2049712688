#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "metaspec/error.hpp"
#include "metaspec/linalg.hpp"
#include "metaspec/simd.hpp"

namespace metaspec {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSafeMin = std::numeric_limits<double>::min();
constexpr int kMaxQrIterations = 60;
constexpr int kMaxBalanceSweeps = 1000;
constexpr int kMaxInverseIterations = 50;

double copysign_nonzero(double magnitude, double sign) {
  return sign >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Ahues-Tisseur test for neglecting h(k, k-1).
bool negligible_subdiagonal(const Matrix& h, std::size_t k, double norm) {
  const double sub = std::abs(h(k, k - 1));
  if (sub <= kSafeMin) return true;
  double tst = std::abs(h(k - 1, k - 1)) + std::abs(h(k, k));
  if (tst == 0.0) tst = norm;
  if (sub > kEps * tst) return false;
  const double ab = std::max(sub, std::abs(h(k - 1, k)));
  const double ba = std::min(sub, std::abs(h(k - 1, k)));
  const double diff = std::abs(h(k - 1, k - 1) - h(k, k));
  const double aa = std::max(std::abs(h(k, k)), diff);
  const double bb = std::min(std::abs(h(k, k)), diff);
  const double s = aa + ab;
  return ba * (ab / s) <= std::max(kSafeMin, kEps * (bb * (aa / s)));
}

}  // namespace

void balance(Matrix& a) {
  if (!a.square()) throw DomainError("balance: matrix must be square");
  const std::size_t n = a.rows();
  constexpr double radix = 2.0;
  constexpr double radix2 = radix * radix;
  bool done = false;
  for (int sweep = 0; !done && sweep < kMaxBalanceSweeps; ++sweep) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / radix;
      while (c < g) {
        f *= radix;
        c *= radix2;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix2;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        simd::scal(1.0 / f, a.row(i));
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

void hessenberg(Matrix& a) {
  if (!a.square()) throw DomainError("hessenberg: matrix must be square");
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  std::vector<double> w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // length of the reflected column part
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(a(k + 1 + i, k)));
    if (scale == 0.0) continue;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = a(k + 1 + i, k) / scale;
      norm2 += v[i] * v[i];
    }
    const double alpha = copysign_nonzero(std::sqrt(norm2), v[0]);
    v[0] += alpha;
    // v^T v = 2 |x|^2 + 2 alpha x0 = 2 alpha v0.
    const double beta = 1.0 / (alpha * v[0]);
    const std::span<const double> vs(v.data(), m);

    // Left: rows k+1.., columns k.. ;  A -= beta v (v^T A).
    const std::size_t width = n - k;
    std::fill(w.begin(), w.begin() + width, 0.0);
    std::span<double> ws(w.data(), width);
    for (std::size_t i = 0; i < m; ++i) simd::axpy(v[i], a.row(k + 1 + i).subspan(k), ws);
    for (std::size_t i = 0; i < m; ++i) simd::axpy(-beta * v[i], ws, a.row(k + 1 + i).subspan(k));

    // Right: all rows, columns k+1.. ;  A -= beta (A v) v^T.
    for (std::size_t r = 0; r < n; ++r) {
      auto tail = a.row(r).subspan(k + 1);
      const double t = simd::dot(tail, vs);
      simd::axpy(-beta * t, vs, tail);
    }
    a(k + 1, k) = -alpha * scale;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

std::vector<complex> hessenberg_eigenvalues(Matrix a) {
  if (!a.square()) throw DomainError("hessenberg_eigenvalues: matrix must be square");
  const int n = static_cast<int>(a.rows());
  std::vector<complex> w(n);
  if (n == 0) return w;
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  if (!std::isfinite(anorm)) throw DomainError("eigenvalues: matrix has non-finite entries");

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        if (negligible_subdiagonal(a, l, anorm)) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        w[nn--] = x + t;
      } else {
        double y = a(nn - 1, nn - 1);
        double ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + ww;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + copysign_nonzero(z, p);
            w[nn - 1] = w[nn] = x + z;
            if (z != 0.0) w[nn] = x - ww / z;
          } else {
            w[nn] = complex(x + p, -z);
            w[nn - 1] = std::conj(w[nn]);
          }
          nn -= 2;
        } else {
          if (its == kMaxQrIterations) {
            std::ostringstream os;
            os << "eigenvalues: QR iteration did not converge; subdiagonal entry (" << nn << ","
               << nn - 1 << ") failed to deflate after " << its << " iterations";
            throw NumericError(os.str());
          }
          if (its > 0 && its % 10 == 0) {
            // Exceptional shift.
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = (k + 1 != nn) ? a(k + 2, k - 1) : 0.0;
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = copysign_nonzero(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k + 1 != nn) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const int mmin = std::min(nn, k + 3);
            for (int i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k + 1 != nn) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return w;
}

std::vector<complex> eigenvalues(const Matrix& a) {
  if (!a.square()) throw DomainError("eigenvalues: matrix must be square");
  for (double v : a.data()) {
    if (!std::isfinite(v)) throw DomainError("eigenvalues: matrix has non-finite entries");
  }
  Matrix h = a;
  balance(h);
  hessenberg(h);
  return hessenberg_eigenvalues(std::move(h));
}

std::vector<complex> inverse_iteration(const Matrix& a, complex lambda, double tol) {
  if (!a.square()) throw DomainError("inverse_iteration: matrix must be square");
  const std::size_t n = a.rows();
  const double anorm = std::max(norm_inf(a), kSafeMin);
  CMatrix shifted = to_complex(a);
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda;
  Lu<complex> lu(std::move(shifted));
  lu.replace_zero_pivots(kEps * anorm);

  std::mt19937_64 rng(0x5eed1234abcdULL);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<complex> v(n);
  for (auto& e : v) e = unit(rng);

  auto normalize = [](std::vector<complex>& x) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
      if (std::abs(x[i]) > std::abs(x[k])) k = i;
    const complex pivot = x[k];
    if (pivot == complex{}) throw NumericError("inverse_iteration: iterate vanished");
    for (auto& e : x) e /= pivot;
    x[k] = 1.0;
  };

  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxInverseIterations; ++it) {
    v = lu.solve(v);
    for (const auto& e : v) {
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
        throw NumericError("inverse_iteration: iterate overflowed");
    }
    normalize(v);
    const auto av = multiply(a, v);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(av[i] - lambda * v[i]));
    if (residual <= tol * anorm) return v;  // |v|_inf = 1
  }
  std::ostringstream os;
  os << "inverse_iteration: residual " << residual / anorm << " (relative) above " << tol
     << " after " << kMaxInverseIterations << " iterations at lambda=" << lambda;
  throw NumericError(os.str());
}

}  // namespace metaspec
