#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "metaspec/chain.hpp"
#include "metaspec/error.hpp"
#include "metaspec/spectral.hpp"

using namespace metaspec;

namespace {

constexpr double kAlpha = 1.8;

LimitGenerator example_q() { return limit_generator(example_potential(), kAlpha); }

}  // namespace

TEST_CASE("limit spectrum and eigenvectors of the example") {
  const auto q = example_q();
  const auto ev = limit_eigenvalues(q);
  const double expect[] = {0.0, -0.124, -0.579};
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(std::abs(ev[k].real() - expect[k]) < 5e-4);
    CHECK(ev[k].imag() == 0.0);
  }
  const auto vecs = limit_eigenvectors(q);
  const double psi[3][3] = {{1, 1, 1}, {-0.629, 0.280, 1}, {-0.088, 1, -0.245}};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(vecs[k][j] - psi[k][j]) < 5e-4);
}

TEST_CASE("classify splits by modulus and matches greedily") {
  const auto q = example_q();
  const auto limit = limit_eigenvalues(q);
  std::vector<complex> spec{-500.0, limit[2] + 1e-3, complex(-800.0, 40.0), limit[0] + 1e-9,
                            complex(-800.0, -40.0), limit[1] - 2e-3};
  const auto r = classify(spec, q);
  REQUIRE(r.cluster.size() == 3);
  REQUIRE(r.bulk.size() == 3);
  CHECK(r.bulk.front() == complex(-500.0));
  CHECK(r.pairs[1].distance == doctest::Approx(2e-3));
  CHECK(r.pairs[2].distance == doctest::Approx(1e-3));
  CHECK(r.max_distance == doctest::Approx(2e-3));
  CHECK(r.gap_ratio == doctest::Approx(500.0 / std::abs(limit[2] + 1e-3)));
  CHECK_FALSE(r.ambiguous);
  CHECK_THROWS_AS(classify({0.0, -1.0}, q), DomainError);
}

TEST_CASE("gap witness diverges slower than the scale allows") {
  for (std::size_t n : {2u, 3u, 5u}) {
    double prev_r = 0.0, prev_prod = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const double r = gap_witness(kAlpha, eps, n);
      const double prod = std::pow(eps, kAlpha) * std::pow(r, static_cast<double>(n + 1));
      CHECK(r > prev_r);
      CHECK(prod < prev_prod);
      prev_r = r;
      prev_prod = prod;
    }
  }
}

TEST_CASE("normalize_on and loglog_slope") {
  const auto v = normalize_on({complex(2.0), complex(-4.0), complex(1.0)}, {0, 2});
  CHECK(v[0] == complex(1.0));
  CHECK(v[1] == complex(-2.0));
  CHECK_THROWS_AS(normalize_on({0.0, 0.0}, {0}), NumericError);
  std::vector<double> x{0.1, 0.01, 0.001}, y;
  for (double e : x) y.push_back(3.0 * std::pow(e, 1.7));
  CHECK(loglog_slope(x, y) == doctest::Approx(1.7).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), DomainError);
}

TEST_CASE("well constancy improves as eps decreases") {
  const auto mesh = std::make_shared<const Mesh>(build_uniform(example_potential(), 5.0, 203, 10.0 / 203.0));
  const auto q = example_q();
  double prev = 1e300;
  for (double eps : {0.1, 0.03, 0.01, 3e-3}) {
    CAPTURE(eps);
    const auto g = generator(transition_matrix(mesh, kAlpha, eps));
    const auto r = classify(eigenvalues(g.Q), q);
    const auto vecs = metastable_eigenvectors(g, q, r);
    REQUIRE(vecs.size() == 3);
    CHECK(vecs[0].well_constancy <= 1e-6);
    const double wc = std::max(vecs[1].well_constancy, vecs[2].well_constancy);
    CHECK(wc < prev);
    prev = wc;
  }
}

TEST_CASE("scaled characteristic polynomial agrees with the eigenvalue product") {
  // Oracle: det(Q^eps - lambda) = prod_k (mu_k - lambda) over the computed spectrum.
  const auto mesh = std::make_shared<const Mesh>(build_uniform(example_potential(), 5.0, 30, 1.0 / 3.0));
  const auto q = example_q();
  const double eps = 0.05;
  const auto g = generator(transition_matrix(mesh, kAlpha, eps));
  const auto mu = eigenvalues(g.Q);
  const std::vector<complex> lambdas{-0.05, -0.3, complex(-0.8, 0.1)};
  const auto rows = charpoly_check(g, q, lambdas);
  REQUIRE(rows.size() == 3);
  const double unit = g.h * std::pow(eps, kAlpha);
  for (std::size_t k = 0; k < 3; ++k) {
    complex prod = 1.0;
    for (const auto& m : mu) prod *= (m - lambdas[k]) * (-unit);
    // Remove the n factors that are not scaled.
    prod /= std::pow(-unit, 3.0);
    CHECK(std::abs(rows[k].scaled - prod) <= 1e-8 * std::abs(prod));
    complex lim = 1.0;
    for (const auto& m : limit_eigenvalues(q)) lim *= m - lambdas[k];
    CHECK(std::abs(rows[k].limit - lim) <= 1e-12);
  }
}
