#include "metaspec/chain.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "metaspec/error.hpp"
#include "metaspec/parallel.hpp"
#include "metaspec/stable.hpp"

namespace metaspec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRowTolerance = 1e-9;

void check_chain_params(double alpha, double epsilon) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    std::ostringstream os;
    os << "chain: alpha must lie in (0, 2), got " << alpha;
    throw DomainError(os.str());
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    std::ostringstream os;
    os << "chain: epsilon must be positive and finite, got " << epsilon;
    throw DomainError(os.str());
  }
}

// One row of P: each interior boundary is evaluated once, as the mass on its
// far side from the shift, and cell masses are differences of those tails.
void fill_row(const Mesh& m, std::size_t x, double scale, const stable::StableParams& law,
              std::span<double> row, double& defect) {
  const std::size_t N = m.size();
  const double shift = m.landing[x];
  // tail[k] belongs to boundary lower[k], k = 1..N-1; lower[0] is treated as -inf.
  std::vector<double> tail(N + 1, 0.0);
  for (std::size_t k = 1; k < N; ++k) {
    const double t = (m.lower[k] - shift) / scale;
    tail[k] = stable::survival(std::abs(t), law);
  }
  auto above = [&](std::size_t k) { return k >= N ? 0.0 : tail[k]; };  // boundary at or right of shift
  auto below = [&](std::size_t k) { return k == 0 ? 0.0 : tail[k]; };  // boundary left of shift
  auto right_of = [&](std::size_t k) {
    if (k == 0) return false;
    if (k >= N) return true;
    return m.lower[k] >= shift;
  };
  double sum = 0.0;
  for (std::size_t y = 0; y < N; ++y) {
    const std::size_t lo = y;       // boundary index of a_y
    const std::size_t hi = y + 1;   // boundary index of b_y (N means +inf)
    double p;
    if (right_of(lo)) {
      p = above(lo) - above(hi);
    } else if (!right_of(hi)) {
      p = below(hi) - below(lo);
    } else {
      p = 1.0 - below(lo) - above(hi);
    }
    if (p < 0.0) p = 0.0;
    row[y] = p;
    sum += p;
  }
  const double residual = 1.0 - sum;
  defect = std::abs(residual);
  if (!(defect <= kRowTolerance)) {
    std::ostringstream os;
    os << "chain: row " << x << " of P sums to " << sum << " (stable-law evaluation suspect)";
    throw NumericError(os.str());
  }
  if (row[x] + residual >= 0.0) {
    row[x] += residual;
  } else {
    row[m.target[x]] += residual;
  }
}

}  // namespace

double StochasticMatrix::time_unit() const { return h * std::pow(epsilon, alpha); }

StochasticMatrix transition_matrix(std::shared_ptr<const Mesh> mesh, double alpha, double epsilon) {
  if (!mesh) throw DomainError("chain: null mesh");
  check_chain_params(alpha, epsilon);
  const stable::StableParams law(alpha);
  const std::size_t N = mesh->size();
  StochasticMatrix out;
  out.P = Matrix(N, N);
  out.alpha = alpha;
  out.epsilon = epsilon;
  out.h = mesh->h;
  const double scale = epsilon * std::pow(mesh->h, 1.0 / alpha);
  std::vector<double> defects(N, 0.0);
  parallel_for(N, [&](std::size_t x) { fill_row(*mesh, x, scale, law, out.P.row(x), defects[x]); });
  for (double d : defects) out.max_row_defect = std::max(out.max_row_defect, d);
  out.mesh = std::move(mesh);
  return out;
}

std::vector<double> Generator::apply(std::span<const double> v) const {
  const std::size_t N = size();
  if (v.size() != N) throw DomainError("generator apply: vector length differs from dimension");
  std::vector<double> y(N);
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (j != i) s += Q(i, j) * v[j];
    }
    y[i] = s + Q(i, i) * v[i];
  }
  return y;
}

Generator generator(const StochasticMatrix& P) {
  const std::size_t N = P.size();
  Generator g;
  g.Q = Matrix(N, N);
  g.mesh = P.mesh;
  g.alpha = P.alpha;
  g.epsilon = P.epsilon;
  g.h = P.h;
  const double inv = 1.0 / P.time_unit();
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      const double q = P.P(i, j) * inv;
      g.Q(i, j) = q;
      s += q;
    }
    g.Q(i, i) = -s;
  }
  return g;
}

LimitGenerator limit_generator(const Potential& p, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("limit generator: alpha must lie in (0, 2)");
  const std::size_t n = p.wells();
  LimitGenerator out;
  out.Q = Matrix(n, n);
  out.minima = p.minima();
  out.maxima = p.maxima();
  out.alpha = alpha;
  auto inv_pow = [alpha](double s, double m) {
    return std::isinf(s) ? 0.0 : std::pow(std::abs(s - m), -alpha);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double m = p.minima()[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      out.Q(i, j) = 0.5 * std::abs(inv_pow(p.barrier(j), m) - inv_pow(p.barrier(j + 1), m));
    }
    out.Q(i, i) = -0.5 * (inv_pow(p.barrier(i), m) + inv_pow(p.barrier(i + 1), m));
  }
  return out;
}

Matrix lumped_rates(const StochasticMatrix& P) {
  const Mesh& m = *P.mesh;
  const std::size_t n = m.wells();
  const double inv = 1.0 / P.time_unit();
  Matrix rates(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = P.P.row(m.minima_index[i]);
    std::vector<double> mass(n, 0.0);
    for (std::size_t y = 0; y < m.size(); ++y) mass[m.well[y] - 1] += row[y];
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      rates(i, j) = mass[j] * inv;
      s += rates(i, j);
    }
    rates(i, i) = -s;
  }
  return rates;
}

Matrix first_order_coefficients(const Mesh& m, double alpha) {
  const std::size_t N = m.size();
  Matrix d(N, N);
  auto inv_pow = [alpha](double dist) { return std::isinf(dist) ? 0.0 : std::pow(dist, -alpha); };
  for (std::size_t x = 0; x < N; ++x) {
    const double z = m.landing[x];
    const std::size_t t = m.target[x];
    double f = 0.0;
    for (std::size_t y = 0; y < N; ++y) {
      if (y == t) continue;
      const double a = y == 0 ? -kInf : m.lower[y];
      const double b = y + 1 == N ? kInf : m.upper[y];
      const double near = y < t ? std::abs(b - z) : std::abs(a - z);
      const double far = y < t ? std::abs(a - z) : std::abs(b - z);
      d(x, y) = 0.5 * (inv_pow(near) - inv_pow(far));
      f += d(x, y);
    }
    d(x, t) = f;
  }
  return d;
}

std::vector<Disc> gershgorin(const Matrix& a) {
  std::vector<Disc> discs(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j != i) r += std::abs(a(i, j));
    }
    discs[i] = {a(i, i), r};
  }
  return discs;
}

void write_csv(std::ostream& os, const Matrix& a) {
  char buf[32];
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.16e", a(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace metaspec
