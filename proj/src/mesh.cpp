#include "metaspec/mesh.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "metaspec/error.hpp"

namespace metaspec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxBands = 1000000;
constexpr int kStretchSamples = 400;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Fills landing, well and target, checks the displacement condition, then runs
// the full validation.
Mesh finalize(Mesh m) {
  const std::size_t N = m.size();
  m.landing.resize(N);
  m.well.resize(N);
  m.target.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    m.landing[k] = m.states[k] - m.h * m.potential.deriv(m.states[k]);
    m.well[k] = well_index(m.states[k], m.potential);
    m.target[k] = cell_of(m, m.landing[k]);
  }
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < N; ++k) {
    if (!m.is_minimum(k) && m.target[k] == k) bad.push_back(k);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "mesh: " << bad.size() << " state(s) violate x - hU'(x) notin I_x (increase h or N):";
    for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 12); ++i) {
      os << " x[" << bad[i] << "]=" << fmt(m.states[bad[i]]);
    }
    if (bad.size() > 12) os << " ...";
    throw BuildError(os.str());
  }
  validate(m);
  return m;
}

void push_cell(Mesh& m, double a, double b, double x) {
  m.lower.push_back(a);
  m.upper.push_back(b);
  m.states.push_back(x);
}

// Splits [a, b) into k equal cells with mid-point states.
void push_split(Mesh& m, double a, double b, std::size_t k) {
  for (std::size_t t = 0; t < k; ++t) {
    const double lo = t == 0 ? a : a + (b - a) * static_cast<double>(t) / k;
    const double hi = t + 1 == k ? b : a + (b - a) * static_cast<double>(t + 1) / k;
    push_cell(m, lo, hi, 0.5 * (lo + hi));
  }
}

std::size_t cells_below(double width, double limit) {
  return static_cast<std::size_t>(std::floor(width / limit)) + 1;
}

Mesh uniform_centered(const Potential& p, double R, std::size_t N, double w) {
  const auto& mins = p.minima();
  const std::size_t n = mins.size();
  std::vector<double> barrier{-R};
  barrier.insert(barrier.end(), p.maxima().begin(), p.maxima().end());
  barrier.push_back(R);
  // Stretches in left-to-right order: left of m_1, right of m_1, left of m_2, ...
  struct Stretch {
    double lo, hi;
    std::size_t cells;
  };
  std::vector<Stretch> stretches;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = mins[i] - 0.5 * w;
    const double b = mins[i] + 0.5 * w;
    if (!(a > barrier[i]) || !(b < barrier[i + 1])) {
      throw BuildError("mesh: minimum cell around m_" + std::to_string(i + 1) +
                       " does not fit inside its well (cells too wide)");
    }
    stretches.push_back({barrier[i], a, 0});
    stretches.push_back({b, barrier[i + 1], 0});
  }
  if (N < n + stretches.size()) {
    throw BuildError("mesh: N=" + std::to_string(N) + " is too small for " + std::to_string(n) +
                     " wells");
  }
  std::size_t assigned = 0;
  std::vector<std::pair<double, std::size_t>> remainder;
  for (std::size_t j = 0; j < stretches.size(); ++j) {
    const double q = (stretches[j].hi - stretches[j].lo) / w;
    stretches[j].cells = static_cast<std::size_t>(std::floor(q));
    assigned += stretches[j].cells;
    remainder.push_back({q - std::floor(q), j});
  }
  const std::size_t target = N - n;
  if (assigned > target || target - assigned > stretches.size()) {
    throw BuildError("mesh: cell allocation failed for N=" + std::to_string(N));
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t r = 0; r < target - assigned; ++r) ++stretches[remainder[r].second].cells;
  for (std::size_t j = 0; j < stretches.size(); ++j) {
    if (stretches[j].cells == 0) {
      throw BuildError("mesh: stretch [" + fmt(stretches[j].lo) + ", " + fmt(stretches[j].hi) +
                       ") received no cell; increase N");
    }
  }
  Mesh m{p};
  for (std::size_t i = 0; i < n; ++i) {
    const Stretch& left = stretches[2 * i];
    const Stretch& right = stretches[2 * i + 1];
    push_split(m, left.lo, left.hi, left.cells);
    m.minima_index.push_back(m.states.size());
    push_cell(m, left.hi, right.lo, mins[i]);
    push_split(m, right.lo, right.hi, right.cells);
  }
  return m;
}

Mesh uniform_nearest(const Potential& p, double R, std::size_t N, double w) {
  std::vector<double> edge(N + 1);
  for (std::size_t k = 0; k <= N; ++k) edge[k] = -R + w * static_cast<double>(k);
  edge[N] = R;
  std::vector<bool> pinned(N + 1, false);
  pinned[0] = pinned[N] = true;
  for (std::size_t i = 0; i < p.maxima().size(); ++i) {
    const double s = p.maxima()[i];
    const auto k = static_cast<std::size_t>(std::llround((s + R) / w));
    if (k == 0 || k >= N || pinned[k]) {
      throw BuildError("mesh: maximum s_" + std::to_string(i + 1) + " cannot be snapped to a free "
                       "cell boundary");
    }
    edge[k] = s;
    pinned[k] = true;
  }
  Mesh m{p};
  for (std::size_t k = 0; k < N; ++k) {
    if (!(edge[k + 1] > edge[k])) throw BuildError("mesh: snapping produced an empty cell");
    push_cell(m, edge[k], edge[k + 1], 0.5 * (edge[k] + edge[k + 1]));
  }
  for (std::size_t i = 0; i < p.wells(); ++i) {
    const double x = p.minima()[i];
    std::size_t k = cell_of(m, x);
    if (x == m.lower[k]) {
      // Keep the minimum interior by moving the shared boundary left.
      if (k == 0 || pinned[k]) throw BuildError("mesh: minimum m_" + std::to_string(i + 1) + " sits on a fixed boundary");
      m.lower[k] = m.upper[k - 1] = x - 0.25 * w;
      m.states[k - 1] = 0.5 * (m.lower[k - 1] + m.upper[k - 1]);
    }
    if (!m.minima_index.empty() && m.minima_index.back() == k) {
      throw BuildError("mesh: two minima share one cell; increase N");
    }
    m.states[k] = x;
    m.minima_index.push_back(k);
  }
  return m;
}

// phi(z) = z - h U'(z), increasing on a stretch when h U'' < 1.
struct Flow {
  const Potential& p;
  double h;
  double operator()(double z) const { return z - h * p.deriv(z); }
};

double preimage(const Flow& phi, double value, double lo, double hi) {
  auto f = [&](double z) { return phi(z) - value; };
  std::uintmax_t iters = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (bracket.first + bracket.second);
}

// Cells between a minimum edge `start` and the far end `stop` of one stretch.
// direction = +1 walks right (U' > 0), -1 walks left. Returns the cells in the
// walking order. If `barrier_cell`, the last cell [cut, stop) is a single
// cell whose state sits close to cut.
struct Cell {
  double a, b, x;
};

std::vector<Cell> stretch_cells(const Potential& p, double h, double delta, double start,
                                double stop, double cut, bool barrier_cell, int direction,
                                const std::string& name) {
  const Flow phi{p, h};
  const double limit = 0.5 * delta * (1.0 - 1e-9);
  std::vector<double> z{start};
  while (true) {
    const double zk = z.back();
    if (z.size() > kMaxBands) throw BuildError("mesh: too many preimage bands on " + name);
    // The band ends at the preimage of zk, or at cut if that comes first.
    const bool reaches_cut = direction > 0 ? phi(cut) <= zk : phi(cut) >= zk;
    if (reaches_cut) {
      z.push_back(cut);
      break;
    }
    const double next = direction > 0 ? preimage(phi, zk, zk, cut) : preimage(phi, zk, cut, zk);
    if (!(std::abs(next - zk) > 1e-12 * std::max(1.0, std::abs(zk)))) {
      throw BuildError("mesh: preimage band does not advance at z=" + fmt(zk) + " on " + name);
    }
    z.push_back(next);
  }
  // A sliver band at the cut is merged into its neighbour.
  if (z.size() >= 3) {
    const double last = std::abs(z[z.size() - 1] - z[z.size() - 2]);
    const double prev = std::abs(z[z.size() - 2] - z[z.size() - 3]);
    if (last < 0.05 * prev) z.erase(z.end() - 2);
  }
  std::vector<Cell> cells;
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    const double a = std::min(z[k], z[k + 1]);
    const double b = std::max(z[k], z[k + 1]);
    const std::size_t count = cells_below(b - a, limit);
    for (std::size_t t = 0; t < count; ++t) {
      const std::size_t u = direction > 0 ? t : count - 1 - t;
      const double lo = u == 0 ? a : a + (b - a) * static_cast<double>(u) / count;
      const double hi = u + 1 == count ? b : a + (b - a) * static_cast<double>(u + 1) / count;
      cells.push_back({lo, hi, 0.5 * (lo + hi)});
    }
  }
  if (barrier_cell) {
    double eta = 0.5 * std::abs(stop - cut);
    double x = cut + direction * eta;
    for (int it = 0; it < 200; ++it) {
      x = cut + direction * eta;
      if (direction > 0 ? phi(x) < cut : phi(x) > cut) break;
      eta *= 0.5;
    }
    if (!(direction > 0 ? phi(x) < cut : phi(x) > cut)) {
      throw BuildError("mesh: no admissible state in the barrier cell of " + name);
    }
    cells.push_back({std::min(cut, stop), std::max(cut, stop), x});
  }
  return cells;
}

double max_curvature(const Potential& p, double lo, double hi) {
  double best = 0.0;
  for (int k = 0; k <= kStretchSamples; ++k) {
    const double x = lo + (hi - lo) * k / kStretchSamples;
    best = std::max(best, p.second_deriv(x));
  }
  return best;
}

// Largest h keeping x - hU'(x) between x's minimum and x itself on [lo, hi].
double trapping_bound(const Potential& p, double m, double lo, double hi) {
  double best = kInf;
  for (int k = 0; k <= kStretchSamples; ++k) {
    const double x = lo + (hi - lo) * k / kStretchSamples;
    const double g = std::abs(p.deriv(x));
    if (g > 0.0) best = std::min(best, std::abs(x - m) / g);
  }
  return best;
}

}  // namespace

Alignment parse_alignment(std::string_view name) {
  if (name == "centered") return Alignment::centered;
  if (name == "nearest") return Alignment::nearest;
  throw DomainError("mesh: unknown alignment '" + std::string(name) + "' (centered|nearest)");
}

std::string_view to_string(Alignment a) {
  return a == Alignment::centered ? "centered" : "nearest";
}

bool Mesh::is_minimum(std::size_t k) const {
  return std::find(minima_index.begin(), minima_index.end(), k) != minima_index.end();
}

std::size_t cell_of(const Mesh& m, double x) {
  const auto it = std::upper_bound(m.lower.begin(), m.lower.end(), x);
  if (it == m.lower.begin()) return 0;
  return static_cast<std::size_t>(it - m.lower.begin()) - 1;
}

Mesh build_uniform(const Potential& p, double R, std::size_t N, double h, Alignment align) {
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("mesh: R must be positive and finite");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("mesh: h must be positive and finite");
  if (N < 2 * p.wells()) throw DomainError("mesh: N=" + std::to_string(N) + " is too small");
  if (!(p.minima().front() > -R) || !(p.minima().back() < R)) {
    throw DomainError("mesh: all minima must lie inside (-R, R)");
  }
  for (double s : p.maxima()) {
    if (!(std::abs(s) < R)) throw DomainError("mesh: all maxima must lie inside (-R, R)");
  }
  const double w = 2.0 * R / static_cast<double>(N);
  Mesh m = align == Alignment::centered ? uniform_centered(p, R, N, w) : uniform_nearest(p, R, N, w);
  m.R = R;
  m.h = h;
  double widest = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) widest = std::max(widest, m.upper[k] - m.lower[k]);
  m.delta = 2.0 * widest;
  m.gamma = 1.0 / R + h + m.delta;
  return finalize(std::move(m));
}

Mesh build_adaptive(const Potential& p, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("mesh: gamma must be positive");
  const auto& mins = p.minima();
  const auto& maxs = p.maxima();
  const std::size_t n = mins.size();
  double separation = kInf;
  for (double s : maxs)
    for (double x : mins) separation = std::min(separation, std::abs(s - x));
  const double R = std::max(3.0 / gamma * 1.01,
                            std::max(std::abs(mins.front()), std::abs(mins.back())) + separation);
  const double delta = 0.9 * std::min(gamma / 3.0, separation / 8.0);

  std::vector<double> barrier{-R};
  barrier.insert(barrier.end(), maxs.begin(), maxs.end());
  barrier.push_back(R);

  // Time step: budget, trapping on every stretch, and a monotone flow map.
  double h = gamma / 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mins[i];
    const double left_lo = i == 0 ? -R : barrier[i] + 0.25 * delta;
    const double right_hi = i + 1 == n ? R : barrier[i + 1] - 0.25 * delta;
    const double left_hi = m - 0.25 * delta;
    const double right_lo = m + 0.25 * delta;
    h = std::min(h, 0.9 * trapping_bound(p, m, left_lo, left_hi));
    h = std::min(h, 0.9 * trapping_bound(p, m, right_lo, right_hi));
    const double curvature = std::max(max_curvature(p, left_lo, left_hi), max_curvature(p, right_lo, right_hi));
    if (curvature > 0.0) h = std::min(h, 0.9 / curvature);
  }

  Mesh mesh{p};
  mesh.R = R;
  mesh.h = h;
  mesh.delta = delta;
  mesh.gamma = gamma;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mins[i];
    const std::string name_left = "left stretch of m_" + std::to_string(i + 1);
    const std::string name_right = "right stretch of m_" + std::to_string(i + 1);
    const bool outer_left = i == 0;
    const bool outer_right = i + 1 == n;
    const double cut_left = outer_left ? -R : barrier[i] + 0.25 * delta;
    const double cut_right = outer_right ? R : barrier[i + 1] - 0.25 * delta;
    auto left = stretch_cells(p, h, delta, m - 0.25 * delta, barrier[i], cut_left, !outer_left, -1,
                              name_left);
    auto right = stretch_cells(p, h, delta, m + 0.25 * delta, barrier[i + 1], cut_right,
                               !outer_right, +1, name_right);
    for (auto it = left.rbegin(); it != left.rend(); ++it) push_cell(mesh, it->a, it->b, it->x);
    mesh.minima_index.push_back(mesh.states.size());
    push_cell(mesh, m - 0.25 * delta, m + 0.25 * delta, m);
    for (const auto& c : right) push_cell(mesh, c.a, c.b, c.x);
  }
  return finalize(std::move(mesh));
}

void validate(const Mesh& m) {
  auto fail = [](const std::string& what) { throw StructuralError("mesh invariant: " + what); };
  const std::size_t N = m.size();
  const std::size_t n = m.potential.wells();
  if (N == 0) fail("empty state set");
  if (m.lower.size() != N || m.upper.size() != N || m.landing.size() != N || m.well.size() != N ||
      m.target.size() != N) {
    fail("per-state arrays have inconsistent lengths");
  }
  if (m.minima_index.size() != n) fail("minima_index does not list every minimum");
  if (m.lower.front() != -m.R || m.upper.back() != m.R) fail("cells do not cover [-R, R)");
  for (std::size_t k = 0; k < N; ++k) {
    if (k + 1 < N && m.upper[k] != m.lower[k + 1]) fail("gap or overlap after cell " + std::to_string(k));
    if (!(m.lower[k] < m.states[k] && m.states[k] < m.upper[k])) {
      fail("state " + std::to_string(k) + " is not interior to its cell");
    }
    if (m.upper[k] - m.lower[k] > 0.5 * m.delta * (1.0 + 1e-12)) {
      fail("cell " + std::to_string(k) + " wider than delta/2");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = m.minima_index[i];
    if (k >= N || m.states[k] != m.potential.minima()[i]) fail("m_" + std::to_string(i + 1) + " is not a state");
    if (i > 0 && !(k > m.minima_index[i - 1])) fail("minima_index not increasing");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s = m.potential.maxima()[i];
    if (!std::binary_search(m.upper.begin(), m.upper.end(), s)) {
      fail("s_" + std::to_string(i + 1) + " is not a cell boundary");
    }
  }
  if (!(1.0 / m.R + m.h + m.delta <= m.gamma * (1.0 + 1e-12))) fail("budget 1/R + h + delta exceeds gamma");
  for (std::size_t k = 0; k < N; ++k) {
    if (m.well[k] != well_index(m.states[k], m.potential)) fail("well label of state " + std::to_string(k));
    const std::size_t t = m.target[k];
    if (t >= N || t != cell_of(m, m.landing[k])) fail("target of state " + std::to_string(k));
    if (m.is_minimum(k) != (t == k)) fail("displacement condition at state " + std::to_string(k));
    if (m.well[t] != m.well[k]) fail("T leaves the well at state " + std::to_string(k));
    // Trap: the orbit moves towards the well's minimum without passing it.
    const std::size_t mk = m.minima_index[m.well[k] - 1];
    const bool ok = k < mk ? (t > k && t <= mk) : k > mk ? (t < k && t >= mk) : t == k;
    if (!ok) fail("T overshoots or moves away from the minimum at state " + std::to_string(k));
  }
}

std::size_t t_max(const Mesh& m) {
  std::size_t worst = 0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    std::size_t x = m.target[k];
    std::size_t steps = 1;
    while (!m.is_minimum(x)) {
      x = m.target[x];
      if (++steps > m.size()) {
        throw StructuralError("mesh: T-orbit of state " + std::to_string(k) + " never reaches a minimum");
      }
    }
    worst = std::max(worst, steps);
  }
  return worst;
}

double min_clearance(const Mesh& m) {
  const std::size_t last = m.size() - 1;
  double best = kInf;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const std::size_t y = m.target[k];
    // End cells absorb all mass beyond +-R, so their outer side is open.
    const double a = y == 0 ? -kInf : m.lower[y];
    const double b = y == last ? kInf : m.upper[y];
    best = std::min({best, std::abs(m.landing[k] - a), std::abs(b - m.landing[k])});
  }
  if (!(best > 1e-14)) throw StructuralError("mesh: a landing point sits on a cell boundary (D = 0)");
  return best;
}

double p_eps(const Mesh& m, double alpha, double epsilon) {
  return std::pow(epsilon, alpha) * m.h * std::pow(min_clearance(m), -alpha);
}

void write_table(std::ostream& os, const Mesh& m) {
  os << "# index state a b well target\n";
  char buf[160];
  for (std::size_t k = 0; k < m.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g %d %zu\n", k, m.states[k], m.lower[k],
                  m.upper[k], m.well[k], m.target[k]);
    os << buf;
  }
}

}  // namespace metaspec
