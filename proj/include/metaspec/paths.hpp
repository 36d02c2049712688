#pragma once

// Path-level objects of the chain: committors by exact solves, the committor
// representation of metastable eigenvectors, and reproducible Monte Carlo
// (paths, return times, empirical Laplace transforms, well-process rates).

#include <cstdint>
#include <vector>

#include "metaspec/chain.hpp"
#include "metaspec/linalg.hpp"

namespace metaspec {

/// Counter-based generator: the k-th draw of stream s under seed is a pure
/// function of (seed, s, k), so replicas are reproducible in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Vose alias tables, one per row of P.
class AliasSampler {
 public:
  explicit AliasSampler(const Matrix& P);
  std::size_t sample(std::size_t row, CounterRng& rng) const;

 private:
  std::size_t n_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// P_x(reach m_j before any other minimum) for every state x; j is 1-based.
/// Solves (I - P_TT) v = P_{T, m_j} on the non-minimum states T, with the
/// diagonal of I - P_TT formed as the complement sum.
std::vector<double> committor(const StochasticMatrix& P, std::size_t j);

/// All n committors from one factorisation; entry [j-1][x].
std::vector<std::vector<double>> committors(const StochasticMatrix& P);

/// max_x |psi_x - sum_j psi_{m_j} K_j(x)| for committors K.
double eigvec_residual(const std::vector<complex>& psi,
                       const std::vector<std::vector<double>>& committors, const Mesh& m);

/// State sequence of length steps + 1 starting at x0.
std::vector<std::size_t> simulate(const StochasticMatrix& P, std::size_t x0, std::size_t steps,
                                  std::uint64_t seed);

struct PathStats {
  std::size_t start = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t max_steps = 0;
  std::vector<std::size_t> tau;      // first return times to the minima, k >= 1
  std::size_t incomplete = 0;        // samples that hit max_steps first
  std::size_t t_max = 0;
  std::size_t beyond_t_max = 0;      // samples with tau > t_max
  std::vector<double> u;             // Laplace arguments
  std::vector<double> laplace;       // mean of exp(u tau)
  std::vector<double> laplace_max_share;  // largest single term / sum
  std::vector<double> committor_freq;     // per well: fraction first returning to m_j
};

/// n_samples i.i.d. first-return times to the minima set from x0, each drawn
/// from its own RNG stream; parallel over samples.
PathStats return_time_stats(const StochasticMatrix& P, std::size_t x0, std::size_t n_samples,
                            std::uint64_t seed, const std::vector<double>& u = {},
                            std::size_t max_steps = 1000000);

struct WellTransition {
  double time;  // rescaled time k h eps^alpha
  int from;
  int to;
};

struct WellRates {
  Matrix rates;           // n x n estimated generator
  Matrix counts;          // transitions i -> j
  std::vector<double> time_in_well;
  Matrix ci_half_width;   // 1.96 sqrt(n_ij) / T_i
  std::vector<double> occupation;
  std::size_t steps = 0;
  double horizon = 0.0;
  double debounce_radius = 0.0;
  std::uint64_t seed = 0;
  bool wide_ci = false;   // some off-diagonal pair has fewer than 10 transitions
  std::vector<WellTransition> log;
};

/// Simulates ceil(horizon / (h eps^alpha)) steps from x0 and estimates the well
/// generator as transitions / time. The well label switches only once the path
/// comes within the debounce radius (default: mesh delta) of another minimum.
WellRates well_process_rates(const StochasticMatrix& P, std::size_t x0, double horizon,
                             std::uint64_t seed, double debounce_radius = -1.0);

/// Left null vector of a conservative generator, normalised to sum 1.
std::vector<double> stationary_law(const Matrix& Q);

}  // namespace metaspec
