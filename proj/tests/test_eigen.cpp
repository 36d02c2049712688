#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "metaspec/error.hpp"
#include "metaspec/linalg.hpp"

using namespace metaspec;

namespace {

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = d(g);
  return a;
}

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  return e;
}

// Largest distance from an eigenvalue in `a` to its nearest partner in `b`.
double hausdorff(const std::vector<complex>& a, const std::vector<complex>& b) {
  double worst = 0.0;
  for (const auto& z : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : b) best = std::min(best, std::abs(z - w));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("random matrices: eigenvalues agree with Eigen") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    CAPTURE(seed);
    const auto a = random_matrix(20, seed);
    const auto ev = eigenvalues(a);
    REQUIRE(ev.size() == 20);
    Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(a), false);
    std::vector<complex> ref(es.eigenvalues().data(), es.eigenvalues().data() + 20);
    CHECK(hausdorff(ev, ref) <= 1e-10);
    CHECK(hausdorff(ref, ev) <= 1e-10);

    complex trace = 0.0, det = 1.0;
    for (const auto& z : ev) {
      trace += z;
      det *= z;
    }
    double tr = 0.0;
    for (std::size_t i = 0; i < 20; ++i) tr += a(i, i);
    CHECK(std::abs(trace - tr) <= 1e-10);
    const double ref_det = to_eigen(a).determinant();
    CHECK(std::abs(det - ref_det) <= 1e-9 * std::abs(ref_det));

    // Complex eigenvalues of a real matrix come in conjugate pairs.
    for (const auto& z : ev) {
      if (z.imag() == 0.0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& w : ev) best = std::min(best, std::abs(w - std::conj(z)));
      CHECK(best <= 1e-12 * (1.0 + std::abs(z)));
    }
  }
}

TEST_CASE("known spectra") {
  // Companion matrix of (x-1)(x-2)(x-3)(x^2+1).
  // x^5 - 6x^4 + 12x^3 - 12x^2 + 11x - 6
  Matrix c(5, 5);
  const double coeffs[] = {-6.0, 11.0, -12.0, 12.0, -6.0};
  for (std::size_t j = 0; j < 5; ++j) c(0, j) = -coeffs[4 - j];
  for (std::size_t i = 1; i < 5; ++i) c(i, i - 1) = 1.0;
  const std::vector<complex> expect{1.0, 2.0, 3.0, complex(0, 1), complex(0, -1)};
  CHECK(hausdorff(eigenvalues(c), expect) <= 1e-10);
  CHECK(hausdorff(expect, eigenvalues(c)) <= 1e-10);

  // Badly scaled diagonal similarity of a symmetric matrix; balancing matters.
  Matrix s(4, 4);
  const double d[] = {1e-6, 1.0, 1e4, 1e8};
  const double base[4][4] = {{2, 1, 0, 0}, {1, 2, 1, 0}, {0, 1, 2, 1}, {0, 0, 1, 2}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) s(i, j) = base[i][j] * d[i] / d[j];
  std::vector<complex> sym;
  for (int k = 1; k <= 4; ++k) sym.push_back(2.0 - 2.0 * std::cos(k * std::numbers::pi / 5.0));
  CHECK(hausdorff(eigenvalues(s), sym) <= 1e-10);
}

TEST_CASE("Hessenberg reduction preserves the spectrum") {
  auto a = random_matrix(12, 77);
  const auto before = eigenvalues(a);
  auto h = a;
  hessenberg(h);
  for (std::size_t i = 2; i < 12; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) CHECK(h(i, j) == 0.0);
  CHECK(hausdorff(hessenberg_eigenvalues(h), before) <= 1e-10);
}

TEST_CASE("inverse iteration returns eigenvectors") {
  const auto a = random_matrix(15, 11);
  for (const auto& lambda : eigenvalues(a)) {
    const auto v = inverse_iteration(a, lambda);
    const auto av = multiply(a, std::span<const complex>(v));
    double res = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      res = std::max(res, std::abs(av[i] - lambda * v[i]));
      norm = std::max(norm, std::abs(v[i]));
    }
    CHECK(norm == doctest::Approx(1.0));
    CHECK(res <= 1e-9 * norm_inf(a));
  }
}

TEST_CASE("degenerate input") {
  CHECK(eigenvalues(Matrix(0, 0)).empty());
  Matrix one(1, 1);
  one(0, 0) = -3.0;
  CHECK(eigenvalues(one).front() == complex(-3.0));
  CHECK_THROWS_AS(eigenvalues(Matrix(2, 3)), DomainError);
}
