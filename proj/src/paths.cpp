#include "metaspec/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "metaspec/error.hpp"
#include "metaspec/mesh.hpp"
#include "metaspec/parallel.hpp"

namespace metaspec {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_state(const StochasticMatrix& P, std::size_t x0) {
  if (x0 >= P.size()) {
    std::ostringstream os;
    os << "paths: start state " << x0 << " outside 0.." << P.size() - 1;
    throw DomainError(os.str());
  }
}

std::vector<int> minimum_of_state(const Mesh& m) {
  std::vector<int> out(m.size(), -1);
  for (std::size_t i = 0; i < m.wells(); ++i) out[m.minima_index[i]] = static_cast<int>(i);
  return out;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

AliasSampler::AliasSampler(const Matrix& P) : n_(P.cols()), prob_(P.rows() * n_), alias_(P.rows() * n_) {
  std::vector<double> scaled(n_);
  std::vector<std::uint32_t> small, large;
  for (std::size_t r = 0; r < P.rows(); ++r) {
    double total = 0.0;
    for (std::size_t j = 0; j < n_; ++j) total += P(r, j);
    small.clear();
    large.clear();
    for (std::size_t j = 0; j < n_; ++j) {
      scaled[j] = P(r, j) * static_cast<double>(n_) / total;
      (scaled[j] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(j));
    }
    double* prob = prob_.data() + r * n_;
    std::uint32_t* alias = alias_.data() + r * n_;
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      small.pop_back();
      const std::uint32_t l = large.back();
      prob[s] = scaled[s];
      alias[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t j : large) {
      prob[j] = 1.0;
      alias[j] = j;
    }
    for (std::uint32_t j : small) {  // rounding leftovers
      prob[j] = 1.0;
      alias[j] = j;
    }
  }
}

std::size_t AliasSampler::sample(std::size_t row, CounterRng& rng) const {
  const double u = rng.uniform() * static_cast<double>(n_);
  std::size_t j = static_cast<std::size_t>(u);
  if (j >= n_) j = n_ - 1;
  const std::size_t k = row * n_ + j;
  return (u - static_cast<double>(j)) < prob_[k] ? j : alias_[k];
}

std::vector<std::vector<double>> committors(const StochasticMatrix& P) {
  const Mesh& m = *P.mesh;
  const std::size_t N = P.size();
  const std::size_t n = m.wells();
  const auto min_of = minimum_of_state(m);
  std::vector<std::size_t> transient;
  std::vector<std::size_t> position(N, 0);
  for (std::size_t x = 0; x < N; ++x) {
    if (min_of[x] < 0) {
      position[x] = transient.size();
      transient.push_back(x);
    }
  }
  std::vector<std::vector<double>> out(n, std::vector<double>(N, 0.0));
  for (std::size_t j = 0; j < n; ++j) out[j][m.minima_index[j]] = 1.0;
  const std::size_t T = transient.size();
  if (T == 0) return out;
  Matrix A(T, T);
  Matrix B(T, n);
  for (std::size_t r = 0; r < T; ++r) {
    const std::size_t x = transient[r];
    double off = 0.0;
    for (std::size_t y = 0; y < N; ++y) {
      if (y == x) continue;
      const double p = P.P(x, y);
      off += p;
      if (min_of[y] >= 0) {
        B(r, static_cast<std::size_t>(min_of[y])) = p;
      } else {
        A(r, position[y]) = -p;
      }
    }
    A(r, r) = off;
  }
  const Lu<double> lu(A);
  if (lu.singular()) throw StructuralError("committor: transient block is singular");
  std::vector<double> rhs(T);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < T; ++r) rhs[r] = B(r, j);
    const auto v = lu.solve(rhs);
    for (std::size_t r = 0; r < T; ++r) out[j][transient[r]] = v[r];
  }
  return out;
}

std::vector<double> committor(const StochasticMatrix& P, std::size_t j) {
  if (j < 1 || j > P.mesh->wells()) throw DomainError("committor: well index out of range");
  return committors(P)[j - 1];
}

double eigvec_residual(const std::vector<complex>& psi,
                       const std::vector<std::vector<double>>& committors, const Mesh& m) {
  if (psi.size() != m.size() || committors.size() != m.wells()) {
    throw DomainError("eigvec_residual: sizes do not match the mesh");
  }
  double worst = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x) {
    complex rep = 0.0;
    for (std::size_t j = 0; j < m.wells(); ++j) rep += psi[m.minima_index[j]] * committors[j][x];
    worst = std::max(worst, std::abs(psi[x] - rep));
  }
  return worst;
}

std::vector<std::size_t> simulate(const StochasticMatrix& P, std::size_t x0, std::size_t steps,
                                  std::uint64_t seed) {
  check_state(P, x0);
  const AliasSampler sampler(P.P);
  CounterRng rng(seed, 0);
  std::vector<std::size_t> path{x0};
  path.reserve(steps + 1);
  std::size_t x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    x = sampler.sample(x, rng);
    path.push_back(x);
  }
  return path;
}

PathStats return_time_stats(const StochasticMatrix& P, std::size_t x0, std::size_t n_samples,
                            std::uint64_t seed, const std::vector<double>& u,
                            std::size_t max_steps) {
  check_state(P, x0);
  const Mesh& m = *P.mesh;
  const auto min_of = minimum_of_state(m);
  const AliasSampler sampler(P.P);
  PathStats s;
  s.start = x0;
  s.seed = seed;
  s.samples = n_samples;
  s.max_steps = max_steps;
  s.t_max = t_max(m);
  s.u = u;
  s.tau.assign(n_samples, 0);
  std::vector<int> hit(n_samples, -1);
  parallel_for(n_samples, [&](std::size_t i) {
    CounterRng rng(seed, i);
    std::size_t x = x0;
    for (std::size_t k = 1; k <= max_steps; ++k) {
      x = sampler.sample(x, rng);
      if (min_of[x] >= 0) {
        s.tau[i] = k;
        hit[i] = min_of[x];
        return;
      }
    }
  });
  s.committor_freq.assign(m.wells(), 0.0);
  std::size_t complete = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (hit[i] < 0) {
      ++s.incomplete;
      continue;
    }
    ++complete;
    s.committor_freq[hit[i]] += 1.0;
    if (s.tau[i] > s.t_max) ++s.beyond_t_max;
  }
  for (auto& f : s.committor_freq) f = complete ? f / complete : 0.0;
  for (double ui : u) {
    double sum = 0.0, largest = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
      if (hit[i] < 0) continue;
      const double term = std::exp(ui * static_cast<double>(s.tau[i]));
      sum += term;
      largest = std::max(largest, term);
    }
    s.laplace.push_back(complete ? sum / complete : std::numeric_limits<double>::quiet_NaN());
    s.laplace_max_share.push_back(sum > 0.0 ? largest / sum : 0.0);
  }
  return s;
}

WellRates well_process_rates(const StochasticMatrix& P, std::size_t x0, double horizon,
                             std::uint64_t seed, double debounce_radius) {
  check_state(P, x0);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("well rates: horizon must be positive");
  const Mesh& m = *P.mesh;
  const std::size_t n = m.wells();
  const double radius = debounce_radius >= 0.0 ? debounce_radius : m.delta;
  // Debounce: entering this neighbourhood of m_j switches the label to j.
  std::vector<int> near(m.size(), -1);
  for (std::size_t x = 0; x < m.size(); ++x) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(m.states[x] - m.potential.minima()[j]) <= radius) near[x] = static_cast<int>(j);
    }
  }
  const double unit = P.time_unit();
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / unit));
  const AliasSampler sampler(P.P);
  CounterRng rng(seed, 0);

  WellRates w;
  w.rates = Matrix(n, n);
  w.counts = Matrix(n, n);
  w.ci_half_width = Matrix(n, n);
  w.steps = steps;
  w.horizon = horizon;
  w.debounce_radius = radius;
  w.seed = seed;
  std::vector<std::size_t> visits(n, 0);
  std::vector<std::size_t> jumps(n * n, 0);
  std::size_t x = x0;
  int label = m.well[x0] - 1;
  for (std::size_t k = 1; k <= steps; ++k) {
    ++visits[label];
    x = sampler.sample(x, rng);
    const int j = near[x];
    if (j >= 0 && j != label) {
      ++jumps[label * n + j];
      w.log.push_back({static_cast<double>(k) * unit, label + 1, j + 1});
      label = j;
    }
  }
  w.time_in_well.resize(n);
  w.occupation.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.time_in_well[i] = static_cast<double>(visits[i]) * unit;
    w.occupation[i] = static_cast<double>(visits[i]) / static_cast<double>(steps);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double c = static_cast<double>(jumps[i * n + j]);
      w.counts(i, j) = c;
      if (c < 10) w.wide_ci = true;
      if (w.time_in_well[i] > 0.0) {
        w.rates(i, j) = c / w.time_in_well[i];
        w.ci_half_width(i, j) = 1.96 * std::sqrt(c) / w.time_in_well[i];
      }
      s += w.rates(i, j);
    }
    w.rates(i, i) = -s;
  }
  return w;
}

std::vector<double> stationary_law(const Matrix& Q) {
  const std::size_t n = Q.rows();
  if (!Q.square() || n == 0) throw DomainError("stationary_law: need a nonempty square generator");
  Matrix A(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A(i, j) = Q(j, i);
  for (std::size_t j = 0; j < n; ++j) A(n - 1, j) = 1.0;
  std::vector<double> b(n, 0.0);
  b[n - 1] = 1.0;
  return solve(A, b);
}

}  // namespace metaspec
