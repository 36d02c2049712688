#include "metaspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "metaspec/error.hpp"
#include "metaspec/parallel.hpp"

namespace metaspec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool by_modulus(const complex& a, const complex& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma < mb;
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

bool by_real_desc(const complex& a, const complex& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

complex exp_log(complex phase, double log_abs) {
  if (log_abs == -kInf) return 0.0;
  return phase * std::exp(log_abs);
}

}  // namespace

std::vector<complex> limit_eigenvalues(const LimitGenerator& q) {
  auto ev = eigenvalues(q.Q);
  std::sort(ev.begin(), ev.end(), by_real_desc);
  return ev;
}

SpectrumReport classify(std::vector<complex> spectrum, const LimitGenerator& q) {
  const std::size_t n = q.size();
  if (spectrum.size() < n) {
    std::ostringstream os;
    os << "classify: spectrum has " << spectrum.size() << " eigenvalues, fewer than " << n << " wells";
    throw DomainError(os.str());
  }
  SpectrumReport r;
  std::sort(spectrum.begin(), spectrum.end(), by_modulus);
  r.all = spectrum;
  r.cluster.assign(spectrum.begin(), spectrum.begin() + n);
  r.bulk.assign(spectrum.begin() + n, spectrum.end());
  r.limit = limit_eigenvalues(q);
  r.zero_residual = std::abs(r.cluster.front());

  double cluster_max = 0.0;
  for (const auto& z : r.cluster) cluster_max = std::max(cluster_max, std::abs(z));
  r.gap_ratio = r.bulk.empty() ? kInf : std::abs(r.bulk.front()) / cluster_max;
  r.ambiguous = r.gap_ratio < 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = std::max({std::abs(r.cluster[i]), std::abs(r.cluster[j]), 1e-300});
      if (std::abs(r.cluster[i] - r.cluster[j]) < 1e-6 * scale) r.near_degenerate = true;
    }
  }

  // Greedy matching by global smallest distance.
  struct Candidate {
    double d;
    std::size_t c, l;
  };
  std::vector<Candidate> cand;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t l = 0; l < n; ++l) cand.push_back({std::abs(r.cluster[c] - r.limit[l]), c, l});
  std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.d < b.d; });
  std::vector<bool> used_c(n, false), used_l(n, false);
  r.pairs.resize(n);
  for (const auto& k : cand) {
    if (used_c[k.c] || used_l[k.l]) continue;
    used_c[k.c] = used_l[k.l] = true;
    r.pairs[k.l] = {r.cluster[k.c], r.limit[k.l], k.d};
  }
  for (const auto& p : r.pairs) r.max_distance = std::max(r.max_distance, p.distance);
  return r;
}

double gap_witness(double alpha, double epsilon, std::size_t n) {
  return std::pow(epsilon, -alpha / (2.0 * (static_cast<double>(n) + 1.0)));
}

std::vector<complex> normalize_on(std::vector<complex> v, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw DomainError("normalize_on: no indices");
  std::size_t best = indices.front();
  for (std::size_t k : indices) {
    if (k >= v.size()) throw DomainError("normalize_on: index out of range");
    if (std::abs(v[k]) > std::abs(v[best])) best = k;
  }
  const complex pivot = v[best];
  if (pivot == complex{}) throw NumericError("normalize_on: vector vanishes on the minima");
  for (auto& e : v) e /= pivot;
  v[best] = 1.0;
  return v;
}

std::vector<std::vector<double>> limit_eigenvectors(const LimitGenerator& q) {
  const std::size_t n = q.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<std::vector<double>> out;
  for (const complex lambda : limit_eigenvalues(q)) {
    const auto v = normalize_on(inverse_iteration(q.Q, lambda, 1e-13), all);
    std::vector<double> re(n);
    for (std::size_t i = 0; i < n; ++i) re[i] = v[i].real();
    out.push_back(std::move(re));
  }
  return out;
}

double well_constancy(const std::vector<complex>& psi, const std::vector<double>& limit_psi,
                      const Mesh& m) {
  if (psi.size() != m.size()) throw DomainError("well_constancy: eigenvector length differs from mesh");
  double worst = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x) {
    worst = std::max(worst, std::abs(psi[x] - limit_psi[m.well[x] - 1]));
  }
  return worst;
}

std::vector<EigvecReport> metastable_eigenvectors(const Generator& g, const LimitGenerator& q,
                                                  const SpectrumReport& report) {
  const auto limit_vecs = limit_eigenvectors(q);
  std::vector<EigvecReport> out;
  for (std::size_t k = 0; k < report.pairs.size(); ++k) {
    EigvecReport e;
    e.index = k + 1;
    e.eigenvalue = report.pairs[k].eigenvalue;
    e.limit_eigenvalue = report.pairs[k].limit;
    e.psi = normalize_on(inverse_iteration(g.Q, e.eigenvalue), g.mesh->minima_index);
    e.limit_psi = limit_vecs[k];
    e.well_constancy = well_constancy(e.psi, e.limit_psi, *g.mesh);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CharpolyRow> charpoly_check(const Generator& g, const LimitGenerator& q,
                                        const std::vector<complex>& lambdas) {
  const std::size_t N = g.size();
  const std::size_t n = q.size();
  const double log_unit = std::log(g.h) + g.alpha * std::log(g.epsilon);
  const double power = static_cast<double>(N - n);
  const double parity = (N - n) % 2 == 0 ? 1.0 : -1.0;
  std::vector<CharpolyRow> rows(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t k) {
    const complex lambda = lambdas[k];
    CMatrix a = to_complex(g.Q);
    for (std::size_t i = 0; i < N; ++i) a(i, i) -= lambda;
    const auto det = logdet(a);
    CMatrix b = to_complex(q.Q);
    for (std::size_t i = 0; i < n; ++i) b(i, i) -= lambda;
    const auto det_q = logdet(b);
    CharpolyRow row;
    row.lambda = lambda;
    row.limit = exp_log(det_q.phase, det_q.log_abs);
    const double log_scaled = det.log_abs + power * log_unit;
    if (log_scaled > 700.0) {
      row.scaled = complex(kInf, 0.0);
      row.abs_error = kInf;
    } else {
      row.scaled = parity * exp_log(det.phase, log_scaled);
      row.abs_error = std::abs(row.scaled - row.limit);
    }
    rows[k] = row;
  });
  return rows;
}

std::vector<CharpolyRow> charpoly_check(std::shared_ptr<const Mesh> mesh, double alpha,
                                        double epsilon, const std::vector<complex>& lambdas) {
  const auto q = limit_generator(mesh->potential, alpha);
  const auto g = generator(transition_matrix(std::move(mesh), alpha, epsilon));
  return charpoly_check(g, q, lambdas);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("loglog_slope: abscissae coincide");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace metaspec
