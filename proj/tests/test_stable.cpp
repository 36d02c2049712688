#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>

#include "metaspec/error.hpp"
#include "metaspec/stable.hpp"

using namespace metaspec;

// Reference survival values P(L > x) computed in 40- to 80-digit arithmetic
// outside this library: convergent power series (in x^-alpha for alpha < 1,
// in x for alpha > 1) cross-checked against a quadrature of the inversion
// integral split at every half period.
struct Ref {
  double alpha, x, survival;
};
constexpr Ref kRefs[] = {
    {0.5, 0.1, 0.46179557414827097235}, {0.5, 1, 0.31048353411851753261},
    {0.5, 3, 0.21755481871660966384},   {0.5, 10, 0.13516240626377463239},
    {0.5, 50, 0.065895388663163285206}, {1.2, 0.1, 0.48165709211438057829},
    {1.2, 1, 0.32869577637084437784},   {1.2, 3, 0.14067319689052288969},
    {1.2, 10, 0.032839014666797038468}, {1.2, 50, 0.00460397171395640717},
    {1.8, 0.1, 0.48897494808500900924}, {1.8, 1, 0.39128494352972373584},
    {1.8, 3, 0.20688013947421985311},   {1.8, 10, 0.01308237686431012089},
    {1.8, 50, 0.00044548450974485175627},
};

TEST_CASE("survival matches high-precision references") {
  for (const auto& r : kRefs) {
    CAPTURE(r.alpha);
    CAPTURE(r.x);
    const stable::StableParams p(r.alpha);
    CHECK(std::abs(stable::survival(r.x, p) - r.survival) <= 1e-13);
    CHECK(std::abs(stable::survival(-r.x, p) - (1.0 - r.survival)) <= 1e-13);
  }
}

TEST_CASE("Cauchy case equals the closed form") {
  const stable::StableParams p(1.0);
  const double scale = std::numbers::pi / 2.0;  // c(1)
  double worst = 0.0;
  for (double x = -200.0; x <= 200.0; x += 0.173) {
    const double exact = 0.5 + std::atan(x / scale) / std::numbers::pi;
    worst = std::max(worst, std::abs(stable::cdf(x, p) - exact));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("both branches agree at the switch point") {
  for (double a : {0.3, 0.5, 0.8, 1.2, 1.5, 1.8, 1.95}) {
    CAPTURE(a);
    const stable::StableParams p(a);
    const double x = p.switch_point();
    const auto inv = stable::survival_by_inversion(x, p);
    const auto ser = stable::survival_by_series(x, p);
    CHECK(std::abs(inv.value - ser.value) <= 1e-10);
  }
}

TEST_CASE("c(alpha) by quadrature matches the closed form") {
  for (double a : {0.2, 0.5, 1.0, 1.2, 1.8, 1.99}) {
    CAPTURE(a);
    CHECK(std::abs(stable::c_alpha(a) - stable::c_alpha_closed_form(a)) <= 1e-10);
  }
  CHECK(stable::c_alpha_closed_form(1.0) == doctest::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("interval probabilities are consistent") {
  const stable::StableParams p(1.8);
  const double a = stable::interval_prob(-1.0, 2.0, 0.3, 0.7, p);
  const double b = stable::interval_prob(-1.0, 0.5, 0.3, 0.7, p) + stable::interval_prob(0.5, 2.0, 0.3, 0.7, p);
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
  CHECK(stable::interval_prob(-1.0, 2.0, 0.3, 0.7, p) + stable::outside_prob(-1.0, 2.0, 0.3, 0.7, p) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // Deep-tail bins keep relative accuracy instead of cancelling.
  const double tail = stable::interval_prob(1e6, 2e6, 0.0, 1.0, p);
  const double expect = 0.5 * (std::pow(1e6, -1.8) - std::pow(2e6, -1.8));
  CHECK(tail == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("invalid alpha is rejected") {
  CHECK_THROWS_AS(stable::StableParams(0.0), DomainError);
  CHECK_THROWS_AS(stable::StableParams(2.0), DomainError);
  CHECK_THROWS_AS(stable::StableParams(std::nan("")), DomainError);
}
