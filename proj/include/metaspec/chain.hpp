#pragma once

// Transition matrix P^eps of the perturbed chain, the scaled generator
// Q^eps = (P^eps - I) / (h eps^alpha), the limit generator Q on the minima,
// and the lumped rates of the chain started in the minima.

#include <iosfwd>
#include <memory>
#include <vector>

#include "metaspec/linalg.hpp"
#include "metaspec/mesh.hpp"

namespace metaspec {

struct StochasticMatrix {
  Matrix P;
  std::shared_ptr<const Mesh> mesh;
  double alpha = 0.0;
  double epsilon = 0.0;
  double h = 0.0;
  /// Largest |1 - row sum| before the residual was folded into the diagonal.
  double max_row_defect = 0.0;

  std::size_t size() const { return P.rows(); }
  /// h eps^alpha, the duration of one step in rescaled time.
  double time_unit() const;
};

/// P^eps with p_xy = P(x - hU'(x) + eps h^(1/alpha) L_1 in I_y); the end cells
/// take all mass beyond -R and R. Parallel over rows. Throws NumericError if a
/// row misses unit mass by more than 1e-9.
StochasticMatrix transition_matrix(std::shared_ptr<const Mesh> mesh, double alpha, double epsilon);

struct Generator {
  Matrix Q;
  std::shared_ptr<const Mesh> mesh;
  double alpha = 0.0;
  double epsilon = 0.0;
  double h = 0.0;

  std::size_t size() const { return Q.rows(); }
  /// Q v summing each row's off-diagonal terms in column order and adding the
  /// diagonal term last, the order used to build the diagonal; Q 1 is exactly 0.
  std::vector<double> apply(std::span<const double> v) const;
};

/// Off-diagonals p_xy / (h eps^alpha); each diagonal is minus its row's
/// off-diagonal sum, so rows are exactly conservative.
Generator generator(const StochasticMatrix& P);

struct LimitGenerator {
  Matrix Q;
  std::vector<double> minima;
  std::vector<double> maxima;
  double alpha = 0.0;

  std::size_t size() const { return Q.rows(); }
};

/// q_ij = |1/|s_{j-1} - m_i|^alpha - 1/|s_j - m_i|^alpha| / 2 for i != j and
/// q_ii = -(1/|s_{i-1} - m_i|^alpha + 1/|s_i - m_i|^alpha) / 2, with s_0 = -inf
/// and s_n = +inf contributing zero.
LimitGenerator limit_generator(const Potential& p, double alpha);

/// (i, j) entry: (sum over y in well j of p_{m_i, y} - [i == j]) / (h eps^alpha).
Matrix lumped_rates(const StochasticMatrix& P);

/// First-order coefficients of the small-noise expansion of P^eps, with the end
/// cells open towards infinity: entry (x, y) for y != T x is d_xy in
/// p_xy = d_xy eps^alpha h + O(eps^(2 alpha)); entry (x, T x) is f_x, the row
/// sum of the d_xy, in p_{x,Tx} = 1 - f_x eps^alpha h + O(eps^(2 alpha)).
Matrix first_order_coefficients(const Mesh& m, double alpha);

struct Disc {
  double center;
  double radius;
};

/// Row Gershgorin discs.
std::vector<Disc> gershgorin(const Matrix& a);

/// Row-major CSV with 17 significant digits.
void write_csv(std::ostream& os, const Matrix& a);

}  // namespace metaspec
