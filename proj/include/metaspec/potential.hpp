#pragma once

// One-dimensional multi-well potentials U with declared, validated extrema
// m_1 < s_1 < m_2 < ... < s_{n-1} < m_n.

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace metaspec {

class Potential {
 public:
  using Fn = std::function<double(double)>;

  /// Validates the extrema against U' and throws DomainError naming the
  /// offending extremum. `kink_width` > 0 marks a piecewise-linear U' whose
  /// corners are smoothed over that half-width.
  Potential(Fn value, Fn deriv, std::vector<double> minima, std::vector<double> maxima,
            std::string description, double kink_width = 0.0);

  double value(double x) const { return value_(x); }
  double deriv(double x) const { return deriv_(x); }
  /// Central difference of U' (exact for piecewise-linear U' away from corners).
  double second_deriv(double x) const;

  const std::vector<double>& minima() const { return minima_; }
  const std::vector<double>& maxima() const { return maxima_; }
  std::size_t wells() const { return minima_.size(); }
  double kink_width() const { return kink_width_; }
  const std::string& description() const { return description_; }

  /// Barrier s_i for i = 0..n with s_0 = -inf and s_n = +inf.
  double barrier(std::size_t i) const;

 private:
  void validate() const;

  Fn value_;
  Fn deriv_;
  std::vector<double> minima_;
  std::vector<double> maxima_;
  std::string description_;
  double kink_width_;
};

/// 1-based well index i with s_{i-1} <= x < s_i.
int well_index(double x, const Potential& p);

/// Knot of a piecewise-linear derivative: U'(x) = slope at x.
struct Knot {
  double x;
  double slope;
};

/// U' interpolates the knots linearly and is constant beyond the outer knots;
/// U(knots[0].x) = 0. Extrema are the sign changes of U', located exactly.
/// `kink_width` is recorded for the finite-difference exemptions.
Potential piecewise_linear_potential(std::vector<Knot> knots, double kink_width,
                                     std::string description = "piecewise-linear");

constexpr double kDefaultKinkWidth = 0.01;

/// The three-well example with minima -4.015, 0.468, 3.966 and maxima
/// -1.034, 1.921: U' = -1 or +1 except on [e - kappa, e + kappa] around each
/// extremum e, where it is linear.
Potential example_potential(double kappa = kDefaultKinkWidth);

/// U(x) = sum_k coeffs[k] x^k. Even degree >= 4 with positive leading
/// coefficient; extrema are the real roots of U'.
Potential polynomial_potential(std::vector<double> coeffs);

/// Reads "x slope" knot lines ('#' comments allowed) for
/// piecewise_linear_potential. Throws DomainError on malformed input.
std::vector<Knot> read_knot_table(const std::string& path);

}  // namespace metaspec
