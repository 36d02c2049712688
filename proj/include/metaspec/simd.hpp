#pragma once

// Dense vector kernels used by the linear algebra inner loops.
//
// Every kernel has a scalar reference implementation and, on x86_64, an
// AVX2+FMA variant. The variant is picked once at startup from CPUID; the
// environment variable METASPEC_SIMD=scalar forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace metaspec::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scal)(double a, double* x, std::size_t n);
  double (*asum)(const double* x, std::size_t n);
  double (*amax)(const double* x, std::size_t n);
  void (*zaxpy)(std::complex<double> a, const std::complex<double>* x,
                std::complex<double>* y, std::size_t n);
  std::complex<double> (*zdotu)(const std::complex<double>* x,
                                const std::complex<double>* y, std::size_t n);
};

bool available(Isa isa);
const KernelTable& table(Isa isa);
const KernelTable& active();
std::string_view name(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

inline void scal(double a, std::span<double> x) {
  active().scal(a, x.data(), x.size());
}

inline double asum(std::span<const double> x) {
  return active().asum(x.data(), x.size());
}

inline double amax(std::span<const double> x) {
  return active().amax(x.data(), x.size());
}

inline void zaxpy(std::complex<double> a, std::span<const std::complex<double>> x,
                  std::span<std::complex<double>> y) {
  active().zaxpy(a, x.data(), y.data(), x.size());
}

/// Unconjugated complex dot product.
inline std::complex<double> zdotu(std::span<const std::complex<double>> x,
                                  std::span<const std::complex<double>> y) {
  return active().zdotu(x.data(), y.data(), x.size());
}

}  // namespace metaspec::simd
