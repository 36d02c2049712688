#pragma once

// Metastable spectrum analysis of Q^eps against the limit generator Q:
// cluster extraction and gap, well-constancy of eigenvectors, and the scaled
// characteristic polynomial.

#include <vector>

#include "metaspec/chain.hpp"
#include "metaspec/linalg.hpp"

namespace metaspec {

struct MatchedPair {
  complex eigenvalue;  // from the metastable cluster
  complex limit;       // eigenvalue of Q it is paired with
  double distance;
};

struct SpectrumReport {
  std::vector<complex> all;       // every eigenvalue, ascending modulus
  std::vector<complex> cluster;   // the n smallest in modulus
  std::vector<complex> bulk;      // the remaining N - n
  std::vector<complex> limit;     // eigenvalues of Q, descending real part
  std::vector<MatchedPair> pairs; // cluster-to-limit matching, ordered like `limit`
  double zero_residual = 0.0;     // |lambda| of the smallest-modulus eigenvalue
  double gap_ratio = 0.0;         // min |bulk| / max |cluster|; +inf if bulk is empty
  double max_distance = 0.0;      // max over pairs
  bool ambiguous = false;         // gap_ratio < 2
  bool near_degenerate = false;   // two cluster eigenvalues within 1e-6 relative
};

/// Splits `spectrum` into cluster and bulk by modulus and pairs the cluster
/// with sigma(Q) greedily by smallest distance.
SpectrumReport classify(std::vector<complex> spectrum, const LimitGenerator& q);

/// Eigenvalues of Q sorted by descending real part (0 first).
std::vector<complex> limit_eigenvalues(const LimitGenerator& q);

/// r_eps = eps^(-alpha / (2 (n + 1))), a concrete sequence with
/// eps^alpha r_eps^(n+1) -> 0 and r_eps -> infinity.
double gap_witness(double alpha, double epsilon, std::size_t n);

/// Scales v so that its entry of largest modulus among `indices` equals 1.
std::vector<complex> normalize_on(std::vector<complex> v, const std::vector<std::size_t>& indices);

struct EigvecReport {
  std::size_t index = 0;          // 1-based position in the cluster ordering
  complex eigenvalue;
  std::vector<complex> psi;       // over the states, normalised on the minima
  complex limit_eigenvalue;
  std::vector<double> limit_psi;  // over the wells, same normalisation
  double well_constancy = 0.0;
};

/// max_x |psi_x - limit_psi[well(x)]|.
double well_constancy(const std::vector<complex>& psi, const std::vector<double>& limit_psi,
                      const Mesh& m);

/// Right eigenvectors of Q normalised so that max_j |psi_j| = 1 with that
/// entry equal to +1; column k belongs to limit_eigenvalues(q)[k].
std::vector<std::vector<double>> limit_eigenvectors(const LimitGenerator& q);

/// Eigenvector reports for the cluster of `report`, paired with Q's
/// eigenvectors, ordered like report.limit.
std::vector<EigvecReport> metastable_eigenvectors(const Generator& g, const LimitGenerator& q,
                                                  const SpectrumReport& report);

struct CharpolyRow {
  complex lambda;
  complex scaled;   // (-eps^alpha h)^(N-n) det(Q^eps - lambda I)
  complex limit;    // det(Q - lambda I)
  double abs_error; // +inf if the scaled value overflows
};

/// Compares the scaled characteristic polynomial of Q^eps with that of Q at
/// each lambda; determinants are combined in log space. Parallel over lambda.
std::vector<CharpolyRow> charpoly_check(const Generator& g, const LimitGenerator& q,
                                        const std::vector<complex>& lambdas);

std::vector<CharpolyRow> charpoly_check(std::shared_ptr<const Mesh> mesh, double alpha,
                                        double epsilon, const std::vector<complex>& lambdas);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace metaspec
