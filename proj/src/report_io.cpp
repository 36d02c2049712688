#include "metaspec/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "metaspec/error.hpp"

namespace metaspec::io {
namespace {

// JSON has no infinities; they are spelled out as strings.
json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

json to_json(complex z) { return {{"re", number(z.real())}, {"im", number(z.imag())}}; }

json to_json(const std::vector<complex>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(to_json(z));
  return out;
}

json to_json(const Matrix& a) {
  json out = json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(number(a(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const SpectrumReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"eigenvalue", to_json(p.eigenvalue)}, {"limit", to_json(p.limit)},
                     {"distance", number(p.distance)}});
  }
  return {{"size", r.all.size()},
          {"cluster", to_json(r.cluster)},
          {"limit", to_json(r.limit)},
          {"matched_pairs", pairs},
          {"max_distance", number(r.max_distance)},
          {"zero_residual", number(r.zero_residual)},
          {"gap_ratio", number(r.gap_ratio)},
          {"min_bulk_modulus", r.bulk.empty() ? json(nullptr) : number(std::abs(r.bulk.front()))},
          {"ambiguous", r.ambiguous},
          {"near_degenerate", r.near_degenerate}};
}

json to_json(const EigvecReport& e) {
  return {{"index", e.index},
          {"eigenvalue", to_json(e.eigenvalue)},
          {"limit_eigenvalue", to_json(e.limit_eigenvalue)},
          {"limit_psi", e.limit_psi},
          {"well_constancy", number(e.well_constancy)}};
}

json to_json(const LimitGenerator& q) {
  return {{"alpha", q.alpha}, {"minima", q.minima}, {"maxima", q.maxima}, {"Q", to_json(q.Q)}};
}

json to_json(const PathStats& s) {
  json laplace = json::array();
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    laplace.push_back({{"u", s.u[k]}, {"mean", number(s.laplace[k])},
                       {"max_share", number(s.laplace_max_share[k])}});
  }
  double mean = 0.0;
  std::size_t complete = 0;
  for (std::size_t t : s.tau) {
    if (t == 0) continue;
    mean += static_cast<double>(t);
    ++complete;
  }
  return {{"start", s.start},
          {"seed", s.seed},
          {"samples", s.samples},
          {"max_steps", s.max_steps},
          {"incomplete", s.incomplete},
          {"t_max", s.t_max},
          {"beyond_t_max", s.beyond_t_max},
          {"mean_return_time", complete ? number(mean / complete) : json(nullptr)},
          {"committor_freq", s.committor_freq},
          {"laplace", laplace}};
}

json to_json(const WellRates& w) {
  return {{"seed", w.seed},
          {"horizon", w.horizon},
          {"steps", w.steps},
          {"debounce_radius", w.debounce_radius},
          {"rates", to_json(w.rates)},
          {"counts", to_json(w.counts)},
          {"ci_half_width", to_json(w.ci_half_width)},
          {"time_in_well", w.time_in_well},
          {"occupation", w.occupation},
          {"wide_ci", w.wide_ci},
          {"transitions", w.log.size()}};
}

json to_json(const std::vector<CharpolyRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"lambda", to_json(r.lambda)}, {"scaled", to_json(r.scaled)},
                   {"limit", to_json(r.limit)}, {"abs_error", number(r.abs_error)}});
  }
  return out;
}

std::string format(double x) {
  if (std::isnan(x)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string csv_preamble(const json& config) {
  return std::string("# metaspec ") + version() + "\n# config " + config.dump() + "\n";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    if (!os.flush()) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + ": " + ec.message());
}

const char* version() { return METASPEC_VERSION; }

}  // namespace metaspec::io
