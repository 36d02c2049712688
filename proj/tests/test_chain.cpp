#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <sstream>

#include "metaspec/chain.hpp"
#include "metaspec/error.hpp"
#include "metaspec/spectral.hpp"

using namespace metaspec;

namespace {

constexpr double kAlpha = 1.8;

std::shared_ptr<const Mesh> paper_mesh() {
  static const auto m = std::make_shared<const Mesh>(build_uniform(example_potential(), 5.0, 203, 10.0 / 203.0));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

}  // namespace

TEST_CASE("limit generator from the jump-rate formula") {
  const auto q = limit_generator(example_potential(), kAlpha);
  const double m[] = {-4.015, 0.468, 3.966};
  const double s1 = -1.034, s2 = 1.921;
  auto r = [](double d) { return std::pow(std::abs(d), -kAlpha); };
  const double expect[3][3] = {
      {-0.5 * r(s1 - m[0]), 0.5 * (r(s1 - m[0]) - r(s2 - m[0])), 0.5 * r(s2 - m[0])},
      {0.5 * r(s1 - m[1]), -0.5 * (r(s1 - m[1]) + r(s2 - m[1])), 0.5 * r(s2 - m[1])},
      {0.5 * r(s1 - m[2]), 0.5 * (r(s2 - m[2]) - r(s1 - m[2])), -0.5 * r(s2 - m[2])}};
  for (std::size_t i = 0; i < 3; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(q.Q(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-14));
      row += q.Q(i, j);
    }
    CHECK(std::abs(row) <= 1e-15);
  }
  CHECK_THROWS_AS(limit_generator(example_potential(), 2.5), DomainError);
}

TEST_CASE("transition matrices are stochastic and generators conservative") {
  for (double eps : {0.3, 0.1, 0.01, 1e-3, 1e-5}) {
    CAPTURE(eps);
    const auto P = transition_matrix(paper_mesh(), kAlpha, eps);
    for (std::size_t i = 0; i < P.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < P.size(); ++j) {
        CHECK(P.P(i, j) >= 0.0);
        s += P.P(i, j);
      }
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    const auto g = generator(P);
    const auto q1 = g.apply(std::vector<double>(g.size(), 1.0));
    for (double v : q1) CHECK(v == 0.0);
    for (const auto& d : gershgorin(g.Q)) CHECK(d.center + d.radius <= 1e-12 * std::abs(d.center));
  }
}

TEST_CASE("lumped rates approach Q at rate eps^alpha") {
  const auto q = limit_generator(example_potential(), kAlpha);
  std::vector<double> eps{0.3, 0.1, 0.03, 0.01}, err;
  for (double e : eps) err.push_back(max_abs_diff(lumped_rates(transition_matrix(paper_mesh(), kAlpha, e)), q.Q));
  const double slope = loglog_slope(eps, err);
  CHECK(std::abs(slope - kAlpha) <= 0.15 * kAlpha);
}

TEST_CASE("transition probabilities follow the first-order expansion") {
  const auto m = paper_mesh();
  const auto d = first_order_coefficients(*m, kAlpha);
  auto error = [&](double eps) {
    const auto P = transition_matrix(m, kAlpha, eps);
    const double unit = P.time_unit();
    double worst = 0.0;
    for (std::size_t x = 0; x < m->size(); ++x) {
      for (std::size_t y = 0; y < m->size(); ++y) {
        const double expect = y == m->target[x] ? 1.0 - d(x, y) * unit : d(x, y) * unit;
        worst = std::max(worst, std::abs(P.P(x, y) - expect) / unit);
      }
    }
    return worst;
  };
  const std::vector<double> eps{0.03, 0.01, 3e-3};
  std::vector<double> err;
  for (double e : eps) err.push_back(error(e));
  for (double e : err) CHECK(e > 0.0);
  const double slope = loglog_slope(eps, err);
  CHECK(std::abs(slope - kAlpha) <= 0.2 * kAlpha);
}

TEST_CASE("parameter checks") {
  CHECK_THROWS_AS(transition_matrix(paper_mesh(), 2.0, 0.1), DomainError);
  CHECK_THROWS_AS(transition_matrix(paper_mesh(), kAlpha, 0.0), DomainError);
  CHECK_THROWS_AS(transition_matrix(paper_mesh(), kAlpha, -1.0), DomainError);
}

TEST_CASE("matrix CSV uses 17 significant digits") {
  Matrix a(1, 2);
  a(0, 0) = 1.0 / 3.0;
  a(0, 1) = -2.5e-300;
  std::ostringstream os;
  write_csv(os, a);
  CHECK(os.str() == "3.3333333333333331e-01,-2.5000000000000000e-300\n");
}
