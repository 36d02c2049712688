#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "metaspec/error.hpp"
#include "metaspec/mesh.hpp"

using namespace metaspec;

namespace {

void check_partition(const Mesh& m) {
  CHECK(m.lower.front() == -m.R);
  CHECK(m.upper.back() == m.R);
  for (std::size_t k = 0; k < m.size(); ++k) {
    CHECK(m.lower[k] < m.states[k]);
    CHECK(m.states[k] < m.upper[k]);
    CHECK(m.upper[k] - m.lower[k] <= 0.5 * m.delta + 1e-12);
    if (k + 1 < m.size()) CHECK(m.upper[k] == m.lower[k + 1]);
  }
}

}  // namespace

TEST_CASE("paper mesh: 203 cells with the minima as states") {
  const auto p = example_potential();
  const auto m = build_uniform(p, 5.0, 203, 10.0 / 203.0);
  REQUIRE(m.size() == 203);
  check_partition(m);
  for (std::size_t i = 0; i < 3; ++i) CHECK(m.states[m.minima_index[i]] == p.minima()[i]);
  for (double s : p.maxima()) {
    CHECK(std::find(m.lower.begin(), m.lower.end(), s) != m.lower.end());
  }
  for (std::size_t k = 0; k < m.size(); ++k) {
    CHECK(m.well[k] == well_index(m.states[k], p));
    if (!m.is_minimum(k)) {
      CHECK(m.target[k] != k);
      CHECK(m.target[k] == cell_of(m, m.states[k] - m.h * p.deriv(m.states[k])));
    } else {
      CHECK(m.target[k] == k);
    }
  }
  CHECK(m.gamma == doctest::Approx(1.0 / 5.0 + m.h + m.delta));
  CHECK_NOTHROW(validate(m));
  CHECK(t_max(m) > 0);
  CHECK(min_clearance(m) > 0.0);
}

TEST_CASE("cell_of puts boundaries to the right and clamps") {
  const auto m = build_uniform(example_potential(), 5.0, 203, 10.0 / 203.0);
  CHECK(cell_of(m, m.lower[10]) == 10);
  CHECK(cell_of(m, std::nextafter(m.lower[10], -10.0)) == 9);
  CHECK(cell_of(m, -100.0) == 0);
  CHECK(cell_of(m, 100.0) == m.size() - 1);
}

TEST_CASE("nearest alignment also covers the range") {
  const auto m = build_uniform(example_potential(), 5.0, 203, 10.0 / 203.0, Alignment::nearest);
  REQUIRE(m.size() == 203);
  check_partition(m);
  CHECK_NOTHROW(validate(m));
  CHECK(parse_alignment("nearest") == Alignment::nearest);
  CHECK(to_string(Alignment::centered) == "centered");
  CHECK_THROWS_AS(parse_alignment("middle"), DomainError);
}

TEST_CASE("adaptive mesh meets its budget") {
  const auto p = example_potential();
  for (double gamma : {1.0, 0.6}) {
    CAPTURE(gamma);
    const auto m = build_adaptive(p, gamma);
    check_partition(m);
    CHECK(m.gamma <= gamma + 1e-12);
    CHECK(1.0 / m.R + m.h + m.delta <= gamma + 1e-12);
    CHECK_NOTHROW(validate(m));
    for (std::size_t i = 0; i < 3; ++i) CHECK(m.states[m.minima_index[i]] == p.minima()[i]);
  }
}

TEST_CASE("invalid requests") {
  const auto p = example_potential();
  CHECK_THROWS_AS(build_uniform(p, 3.0, 203, 0.05), DomainError);   // minimum outside
  CHECK_THROWS_AS(build_uniform(p, 5.0, 4, 0.05), DomainError);
  CHECK_THROWS_AS(build_uniform(p, 5.0, 203, -1.0), DomainError);
  CHECK_THROWS_AS(build_uniform(p, 5.0, 203, 1e-4), BuildError);    // displacement condition
  CHECK_THROWS_AS(build_adaptive(p, -1.0), DomainError);
}

TEST_CASE("p_eps and the state table") {
  const auto m = build_uniform(example_potential(), 5.0, 203, 10.0 / 203.0);
  const double D = min_clearance(m);
  CHECK(p_eps(m, 1.8, 0.01) == doctest::Approx(std::pow(0.01, 1.8) * m.h * std::pow(D, -1.8)));
  std::ostringstream os;
  write_table(os, m);
  const std::string s = os.str();
  CHECK(s.rfind("# index state a b well target", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 204);
}
