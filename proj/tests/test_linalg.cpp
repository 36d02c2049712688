#include <doctest.h>

#include <random>

#include <Eigen/Dense>

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

}  // namespace

TEST_CASE("LU solve matches Eigen") {
  const auto a = random_matrix(40, 3);
  std::vector<double> b(40);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(static_cast<double>(i));
  const auto x = solve(a, b);
  const Eigen::VectorXd xe = to_eigen(a).partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), 40));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(xe[i]).epsilon(1e-10));
}

TEST_CASE("log-determinant matches Eigen, real and complex") {
  const auto a = random_matrix(25, 5);
  const double det = to_eigen(a).determinant();
  const auto ld = logdet(a);
  CHECK(ld.phase == doctest::Approx(det > 0 ? 1.0 : -1.0));
  CHECK(ld.log_abs == doctest::Approx(std::log(std::abs(det))).epsilon(1e-12));

  CMatrix c = to_complex(a);
  for (std::size_t i = 0; i < c.rows(); ++i) c(i, i) += complex(0.0, 1.5);
  Eigen::MatrixXcd ce = to_eigen(a).cast<std::complex<double>>();
  ce.diagonal().array() += std::complex<double>(0.0, 1.5);
  const std::complex<double> cdet = ce.determinant();
  const auto cl = logdet(c);
  CHECK(cl.log_abs == doctest::Approx(std::log(std::abs(cdet))).epsilon(1e-12));
  CHECK(std::abs(cl.phase - cdet / std::abs(cdet)) <= 1e-10);
}

TEST_CASE("log-determinant survives overflow") {
  Matrix a = Matrix::identity(300);
  for (std::size_t i = 0; i < 300; ++i) a(i, i) = 1e10;
  const auto ld = logdet(a);
  CHECK(ld.phase == 1.0);
  CHECK(ld.log_abs == doctest::Approx(300.0 * std::log(1e10)));
  a(7, 7) = -1e10;
  CHECK(logdet(a).phase == -1.0);
}

TEST_CASE("singular matrices are flagged") {
  Matrix a(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const Lu<double> lu(a);
  CHECK(lu.singular());
  CHECK(lu.logdet().log_abs == -std::numeric_limits<double>::infinity());
}

TEST_CASE("norms and products") {
  const auto a = random_matrix(6, 9);
  const auto e = to_eigen(a);
  CHECK(norm_inf(a) == doctest::Approx(e.cwiseAbs().rowwise().sum().maxCoeff()));
  CHECK(norm_fro(a) == doctest::Approx(e.norm()));
  const auto p = multiply(a, a);
  const Eigen::MatrixXd pe = e * e;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(p(i, j) == doctest::Approx(pe(i, j)));
}
