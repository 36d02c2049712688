// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "metaspec/chain.hpp"
#include "metaspec/paths.hpp"
#include "metaspec/spectral.hpp"
#include "metaspec/stable.hpp"

using namespace metaspec;

namespace {

constexpr double kAlpha = 1.8;
const std::vector<double> kSweep{0.1, 0.03, 0.01, 3e-3};
const std::vector<double> kRateSweep{0.3, 0.1, 0.03, 0.01};

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

std::shared_ptr<const Mesh> paper_mesh() {
  static const auto m = std::make_shared<const Mesh>(build_uniform(example_potential(), 5.0, 203, 10.0 / 203.0));
  return m;
}

const LimitGenerator& limit_q() {
  static const auto q = limit_generator(example_potential(), kAlpha);
  return q;
}

struct Run {
  double eps;
  StochasticMatrix P;
  Generator g;
  std::vector<complex> spectrum;
  SpectrumReport report;
  std::vector<EigvecReport> vecs;
  std::vector<std::vector<double>> K;
};

// Pipeline runs on the paper mesh, cached by epsilon.
const Run& run_at(double eps) {
  static std::vector<std::unique_ptr<Run>> cache;
  for (const auto& r : cache)
    if (r->eps == eps) return *r;
  auto r = std::make_unique<Run>();
  r->eps = eps;
  r->P = transition_matrix(paper_mesh(), kAlpha, eps);
  r->g = generator(r->P);
  r->spectrum = eigenvalues(r->g.Q);
  r->report = classify(r->spectrum, limit_q());
  r->vecs = metastable_eigenvectors(r->g, limit_q(), r->report);
  r->K = committors(r->P);
  cache.push_back(std::move(r));
  return *cache.back();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

Verdict check_limit_spectrum() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto q = limit_generator(example_potential(), kAlpha);
  const auto ev = limit_eigenvalues(q);
  const auto vecs = limit_eigenvectors(q);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double lam[] = {0.0, -0.124, -0.579};
  const double psi[3][3] = {{1, 1, 1}, {-0.629, 0.280, 1}, {-0.088, 1, -0.245}};
  double worst = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    worst = std::max(worst, std::abs(ev[k] - lam[k]));
    for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(vecs[k][j] - psi[k][j]));
  }
  return {worst < 5e-4 && secs < 1.0,
          fmt("eigenvalues %.6f %.6f %.6f, max deviation from 3-decimal values %.2e, %.3f s", ev[0].real(),
              ev[1].real(), ev[2].real(), worst, secs)};
}

Verdict check_full_pipeline() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& r = run_at(1e-5);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {r.report.max_distance <= 1e-4 && r.spectrum.size() == 203 && secs < 30.0,
          fmt("N=%zu, max |lambda^eps - lambda^Q| = %.2e, %.2f s", r.spectrum.size(), r.report.max_distance, secs)};
}

Verdict check_spectral_gap() {
  std::vector<double> bulk;
  std::string gaps;
  bool increasing = true;
  double prev = 0.0;
  for (double e : kSweep) {
    const auto& r = run_at(e);
    increasing = increasing && r.report.gap_ratio > prev;
    prev = r.report.gap_ratio;
    bulk.push_back(std::abs(r.report.bulk.front()));
    gaps += fmt(" %.3g", r.report.gap_ratio);
  }
  const double slope = loglog_slope(kSweep, bulk);
  return {increasing && prev > 100.0 && within(slope, -kAlpha, 0.2),
          fmt("gap ratios%s; min bulk modulus slope %.3f (target %.1f +-20%%)", gaps.c_str(), slope, -kAlpha)};
}

Verdict check_well_constancy() {
  const auto& tiny = run_at(1e-5);
  const double w2 = tiny.vecs[1].well_constancy, w3 = tiny.vecs[2].well_constancy;
  bool decreasing = true;
  double prev2 = INFINITY, prev3 = INFINITY;
  std::string seq;
  for (double e : kSweep) {
    const auto& r = run_at(e);
    decreasing = decreasing && r.vecs[1].well_constancy < prev2 && r.vecs[2].well_constancy < prev3;
    prev2 = r.vecs[1].well_constancy;
    prev3 = r.vecs[2].well_constancy;
    seq += fmt(" %.2e/%.2e", prev2, prev3);
  }
  return {w2 <= 1e-2 && w3 <= 1e-2 && decreasing,
          fmt("at eps=1e-5: %.2e, %.2e; sweep (i=2/i=3):%s", w2, w3, seq.c_str())};
}

Verdict check_lumped_rate() {
  std::vector<double> err;
  for (double e : kRateSweep) {
    err.push_back(max_abs_diff(lumped_rates(transition_matrix(paper_mesh(), kAlpha, e)), limit_q().Q));
  }
  const double slope = loglog_slope(kRateSweep, err);
  return {within(slope, kAlpha, 0.15),
          fmt("errors %.2e %.2e %.2e %.2e; slope %.3f (target %.1f +-15%%)", err[0], err[1], err[2], err[3], slope,
              kAlpha)};
}

Verdict check_charpoly() {
  const auto mesh = std::make_shared<const Mesh>(build_uniform(example_potential(), 5.0, 30, 1.0 / 3.0));
  const std::vector<complex> lambdas{-0.05, -0.3, -0.8};
  std::vector<std::vector<double>> err(lambdas.size());
  for (double e : kRateSweep) {
    const auto rows = charpoly_check(mesh, kAlpha, e, lambdas);
    for (std::size_t k = 0; k < rows.size(); ++k) err[k].push_back(rows[k].abs_error);
  }
  bool ok = true;
  std::string detail = fmt("N=%zu;", mesh->size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double slope = loglog_slope(kRateSweep, err[k]);
    ok = ok && within(slope, kAlpha, 0.2);
    detail += fmt(" lambda=%g slope %.3f", lambdas[k].real(), slope);
  }
  detail += fmt(" (target %.1f +-20%%);", kAlpha);
  // Informational only: the same fit on smaller noise levels.
  const std::vector<double> small{0.01, 3e-3, 1e-3, 1e-4};
  std::vector<std::vector<double>> tail(lambdas.size());
  for (double e : small) {
    const auto rows = charpoly_check(mesh, kAlpha, e, lambdas);
    for (std::size_t k = 0; k < rows.size(); ++k) tail[k].push_back(rows[k].abs_error);
  }
  detail += " slopes over eps 1e-2..1e-4:";
  for (std::size_t k = 0; k < lambdas.size(); ++k) detail += fmt(" %.3f", loglog_slope(small, tail[k]));
  return {ok, detail};
}

Verdict check_stable_oracles() {
  const stable::StableParams cauchy(1.0);
  double cauchy_err = 0.0;
  for (double x = -1000.0; x <= 1000.0; x += 0.0917) {
    const double exact = 0.5 + std::atan(x / (std::numbers::pi / 2.0)) / std::numbers::pi;
    cauchy_err = std::max(cauchy_err, std::abs(stable::cdf(x, cauchy) - exact));
  }
  bool ok = cauchy_err <= 1e-9;
  std::string detail = fmt("Cauchy max error %.1e;", cauchy_err);
  for (double a : {0.5, 1.2, 1.8}) {
    const stable::StableParams p(a);
    const double u = 1e5;
    const double t = std::pow(u, a) * 2.0 * stable::survival(u, p);
    ok = ok && std::abs(t - 1.0) <= 1e-3;
    detail += fmt(" tail(alpha=%g)=%.6f", a, t);
  }
  double c_err = 0.0;
  for (double a : {0.5, 1.0, 1.2, 1.8}) c_err = std::max(c_err, std::abs(stable::c_alpha(a) - stable::c_alpha_closed_form(a)));
  ok = ok && c_err <= 1e-10;
  return {ok, detail + fmt("; c(alpha) error %.1e", c_err)};
}

Verdict check_structural() {
  std::vector<double> all = kSweep;
  all.push_back(1e-5);
  for (double e : kRateSweep) all.push_back(e);
  double row = 0.0, q1 = 0.0, re = -INFINITY;
  for (double e : all) {
    const auto P = transition_matrix(paper_mesh(), kAlpha, e);
    for (std::size_t i = 0; i < P.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < P.size(); ++j) s += P.P(i, j);
      row = std::max(row, std::abs(s - 1.0));
    }
    const auto g = generator(P);
    for (double v : g.apply(std::vector<double>(g.size(), 1.0))) q1 = std::max(q1, std::abs(v));
    const auto& spec = run_at(e).spectrum;
    const double scale = norm_inf(g.Q);
    for (const auto& z : spec) re = std::max(re, z.real() / scale);
  }
  return {row <= 1e-12 && q1 == 0.0 && re <= 1e-8,
          fmt("%zu chains: max row defect %.1e, max |Q 1| %.1e, max Re(lambda)/||Q|| %.1e", all.size(), row, q1, re)};
}

Verdict check_committor_link() {
  const auto& tiny = run_at(1e-5);
  const double r2 = eigvec_residual(tiny.vecs[1].psi, tiny.K, *paper_mesh());
  const double r3 = eigvec_residual(tiny.vecs[2].psi, tiny.K, *paper_mesh());
  std::vector<double> res2, res3;
  for (double e : kSweep) {
    const auto& r = run_at(e);
    res2.push_back(eigvec_residual(r.vecs[1].psi, r.K, *paper_mesh()));
    res3.push_back(eigvec_residual(r.vecs[2].psi, r.K, *paper_mesh()));
  }
  const double s2 = loglog_slope(kSweep, res2), s3 = loglog_slope(kSweep, res3);
  return {r2 <= 1e-3 && r3 <= 1e-3 && within(s2, kAlpha, 0.25) && within(s3, kAlpha, 0.25),
          fmt("at eps=1e-5: %.1e, %.1e; sweep slopes %.3f, %.3f (target %.1f +-25%%)", r2, r3, s2, s3, kAlpha)};
}

Verdict check_well_process() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& r = run_at(0.01);
  const auto& q = limit_q();
  const std::uint64_t seed = 1;
  const auto w = well_process_rates(r.P, paper_mesh()->minima_index[0], 1e4, seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;  // deviation in CI half-widths
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) worst = std::max(worst, std::abs(w.rates(i, j) - q.Q(i, j)) / w.ci_half_width(i, j));
  const auto pi = stationary_law(q.Q);
  double occ = 0.0;
  for (std::size_t i = 0; i < 3; ++i) occ = std::max(occ, std::abs(w.occupation[i] - pi[i]));
  return {worst <= 3.0 && occ <= 0.02 && secs < 300.0,
          fmt("seed %llu, %zu steps, %zu transitions: worst rate deviation %.2f CI half-widths; "
              "occupation %.4f %.4f %.4f vs stationary %.4f %.4f %.4f (max error %.4f); %.1f s",
              static_cast<unsigned long long>(seed), w.steps, w.log.size(), worst, w.occupation[0],
              w.occupation[1], w.occupation[2], pi[0], pi[1], pi[2], occ, secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"limit spectrum reproduction", check_limit_spectrum},
      {"full-pipeline spectrum match", check_full_pipeline},
      {"spectral gap", check_spectral_gap},
      {"eigenvector well-constancy", check_well_constancy},
      {"lumped-rate convergence", check_lumped_rate},
      {"characteristic polynomial convergence", check_charpoly},
      {"stable-law oracles", check_stable_oracles},
      {"structural invariants", check_structural},
      {"committor/eigenvector link", check_committor_link},
      {"well-process rate proxy", check_well_process},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v{false, ""};
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
