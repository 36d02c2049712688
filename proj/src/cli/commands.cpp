#include "metaspec/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "metaspec/chain.hpp"
#include "metaspec/parallel.hpp"
#include "metaspec/paths.hpp"
#include "metaspec/spectral.hpp"

namespace metaspec::cli {
namespace fs = std::filesystem;
using io::format;
using io::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output directory " + dir.string() + " is not writable");
  }
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eps_%.6g", eps);
  return buf;
}

fs::path eps_dir(const RunConfig& cfg, double eps) {
  const auto dir = cfg.out / eps_tag(eps);
  prepare_dir(dir);
  return dir;
}

json envelope(const RunConfig& cfg) {
  return {{"version", io::version()}, {"config", cfg.to_json()}};
}

void emit_json(const fs::path& path, const json& j) { io::write_atomic(path, io::dump(j)); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

double slope_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return kNaN;
  for (double v : y)
    if (!(v > 0.0) || !std::isfinite(v)) return kNaN;
  return loglog_slope(x, y);
}

// Row sums of P, conservativity of Q and the spectrum's real parts.
json structural_checks(const StochasticMatrix& P, const Generator& g, const std::vector<complex>& ev) {
  double row_defect = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < P.size(); ++j) s += P.P(i, j);
    row_defect = std::max(row_defect, std::abs(s - 1.0));
  }
  std::vector<double> ones(g.size(), 1.0);
  double q1 = 0.0;
  for (double v : g.apply(ones)) q1 = std::max(q1, std::abs(v));
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& z : ev) max_re = std::max(max_re, z.real());
  const double qnorm = norm_inf(g.Q);
  return {{"max_row_defect", row_defect},
          {"assembly_row_defect", P.max_row_defect},
          {"q_times_ones_max", q1},
          {"q_norm_inf", qnorm},
          {"max_real_part", max_re},
          {"left_half_plane", max_re <= 1e-8 * qnorm}};
}

struct Pipeline {
  double epsilon = 0.0;
  StochasticMatrix P;
  Generator g;
  std::vector<complex> spectrum;
  SpectrumReport report;
  std::vector<EigvecReport> vecs;
};

Pipeline run_pipeline(std::shared_ptr<const Mesh> mesh, const LimitGenerator& q, double alpha,
                      double eps) {
  Pipeline r;
  r.epsilon = eps;
  r.P = transition_matrix(std::move(mesh), alpha, eps);
  r.g = generator(r.P);
  r.spectrum = eigenvalues(r.g.Q);
  r.report = classify(r.spectrum, q);
  r.vecs = metastable_eigenvectors(r.g, q, r.report);
  return r;
}

template <class F>
std::vector<Pipeline> per_epsilon(const RunConfig& cfg, F&& make) {
  std::vector<Pipeline> out(cfg.epsilon.size());
  parallel_for(cfg.epsilon.size(), [&](std::size_t k) { out[k] = make(cfg.epsilon[k]); });
  return out;
}

}  // namespace

int cmd_spectrum(const RunConfig& cfg) {
  const auto p = make_potential(cfg);
  const auto mesh = make_mesh(cfg, p);
  const auto q = limit_generator(p, cfg.alpha);
  const auto runs = per_epsilon(cfg, [&](double eps) { return run_pipeline(mesh, q, cfg.alpha, eps); });
  const std::string pre = io::csv_preamble(cfg.to_json());
  for (const auto& r : runs) {
    const auto dir = eps_dir(cfg, r.epsilon);
    std::string csv = pre + "re,im\n";
    for (const auto& z : r.report.all) csv += format(z.real()) + "," + format(z.imag()) + "\n";
    io::write_atomic(dir / "spectrum.csv", csv);

    std::string vec = pre + "i,state,well,re,im\n";
    json vecs = json::array();
    for (const auto& e : r.vecs) {
      for (std::size_t x = 0; x < mesh->size(); ++x) {
        vec += std::to_string(e.index) + "," + format(mesh->states[x]) + "," +
               std::to_string(mesh->well[x]) + "," + format(e.psi[x].real()) + "," +
               format(e.psi[x].imag()) + "\n";
      }
      vecs.push_back(io::to_json(e));
    }
    io::write_atomic(dir / "eigvecs.csv", vec);

    json j = envelope(cfg);
    j["epsilon"] = r.epsilon;
    j["spectrum"] = io::to_json(r.report);
    j["eigenvectors"] = vecs;
    j["checks"] = structural_checks(r.P, r.g, r.spectrum);
    emit_json(dir / "report.json", j);

    std::printf("eps=%-8g N=%zu gap_ratio=%.4g max_distance=%.3e%s\n", r.epsilon, r.P.size(),
                r.report.gap_ratio, r.report.max_distance,
                r.report.ambiguous ? " (ambiguous cluster)" : "");
    for (const auto& pr : r.report.pairs) {
      std::printf("  %+.8f%+.8fi  ~  %+.8f%+.8fi\n", pr.eigenvalue.real(), pr.eigenvalue.imag(),
                  pr.limit.real(), pr.limit.imag());
    }
  }
  return 0;
}

int cmd_limit(const RunConfig& cfg) {
  const auto p = make_potential(cfg);
  const auto q = limit_generator(p, cfg.alpha);
  const auto ev = limit_eigenvalues(q);
  const auto vecs = limit_eigenvectors(q);
  json j = envelope(cfg);
  j["generator"] = io::to_json(q);
  j["eigenvalues"] = io::to_json(ev);
  json jv = json::array();
  for (std::size_t k = 0; k < ev.size(); ++k) {
    jv.push_back({{"eigenvalue", io::to_json(ev[k])}, {"psi", vecs[k]}});
  }
  j["eigenvectors"] = jv;
  j["stationary_law"] = stationary_law(q.Q);
  prepare_dir(cfg.out);
  emit_json(cfg.out / "limit.json", j);
  for (std::size_t k = 0; k < ev.size(); ++k) {
    std::printf("lambda_%zu = %+.6f%+.6fi  psi =", k + 1, ev[k].real(), ev[k].imag());
    for (double v : vecs[k]) std::printf(" %+.5f", v);
    std::printf("\n");
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const auto p = make_potential(cfg);
  const auto mesh = make_mesh(cfg, p);
  const auto q = limit_generator(p, cfg.alpha);
  std::vector<complex> lambdas(cfg.lambda.begin(), cfg.lambda.end());
  const auto runs = per_epsilon(cfg, [&](double eps) { return run_pipeline(mesh, q, cfg.alpha, eps); });
  const std::size_t n = q.size();

  struct Row {
    double eps, distance, lumped, charpoly, gap, bulk, witness, constancy, residual;
  };
  std::vector<Row> rows(runs.size());
  json detail = json::array();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& r = runs[k];
    const auto cp = charpoly_check(r.g, q, lambdas);
    const auto K = committors(r.P);
    Row row{r.epsilon, r.report.max_distance, max_abs_diff(lumped_rates(r.P), q.Q), 0.0,
            r.report.gap_ratio, r.report.bulk.empty() ? kNaN : std::abs(r.report.bulk.front()),
            gap_witness(cfg.alpha, r.epsilon, n), 0.0, 0.0};
    for (const auto& c : cp) row.charpoly = std::max(row.charpoly, c.abs_error);
    for (const auto& e : r.vecs) {
      if (e.index == 1) continue;
      row.constancy = std::max(row.constancy, e.well_constancy);
      row.residual = std::max(row.residual, eigvec_residual(e.psi, K, *mesh));
    }
    rows[k] = row;
    detail.push_back({{"epsilon", r.epsilon}, {"spectrum", io::to_json(r.report)},
                      {"charpoly", io::to_json(cp)}});
  }

  std::vector<double> x, gaps;
  for (const auto& r : rows) {
    x.push_back(r.eps);
    gaps.push_back(r.gap);
  }
  auto column = [&](double Row::*f) {
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(r.*f);
    return y;
  };
  bool gap_increasing = true;  // rows are ordered by descending epsilon
  for (std::size_t k = 1; k < rows.size(); ++k) gap_increasing = gap_increasing && rows[k].gap > rows[k - 1].gap;

  const std::vector<std::pair<const char*, double Row::*>> cols{
      {"cluster_distance", &Row::distance}, {"lumped_error", &Row::lumped},
      {"charpoly_error", &Row::charpoly},   {"gap_ratio", &Row::gap},
      {"min_bulk_modulus", &Row::bulk},     {"gap_witness", &Row::witness},
      {"well_constancy", &Row::constancy}, {"eigvec_residual", &Row::residual}};
  std::string csv = io::csv_preamble(cfg.to_json()) + "epsilon";
  for (const auto& c : cols) csv += std::string(",") + c.first;
  csv += "\n";
  for (const auto& r : rows) {
    csv += format(r.eps);
    for (const auto& c : cols) csv += "," + format(r.*(c.second));
    csv += "\n";
  }
  csv += "slope";
  json slopes = json::object();
  for (const auto& c : cols) {
    const double s = slope_or_nan(x, column(c.second));
    csv += "," + format(s);
    slopes[c.first] = std::isnan(s) ? json("NA") : json(s);
  }
  csv += "\n";
  prepare_dir(cfg.out);
  io::write_atomic(cfg.out / "rates.csv", csv);

  json j = envelope(cfg);
  j["slopes"] = slopes;
  j["gap_ratio_increasing"] = gap_increasing;
  j["runs"] = detail;
  emit_json(cfg.out / "sweep.json", j);

  std::printf("%-10s %-12s %-12s %-12s %-12s\n", "epsilon", "distance", "lumped", "charpoly", "gap_ratio");
  for (const auto& r : rows) {
    std::printf("%-10g %-12.4e %-12.4e %-12.4e %-12.4e\n", r.eps, r.distance, r.lumped, r.charpoly, r.gap);
  }
  std::printf("slopes:");
  for (const auto& c : cols) {
    const auto& s = slopes[c.first];
    if (s.is_string()) {
      std::printf(" %s=NA", c.first);
    } else {
      std::printf(" %s=%.3f", c.first, s.get<double>());
    }
  }
  std::printf("\ngap ratio strictly increasing: %s\n", gap_increasing ? "yes" : "no");
  return 0;
}

int cmd_paths(const RunConfig& cfg) {
  const auto p = make_potential(cfg);
  const auto mesh = make_mesh(cfg, p);
  const auto q = limit_generator(p, cfg.alpha);
  const auto pi = stationary_law(q.Q);
  const std::size_t n = q.size();
  const std::size_t start = cfg.start >= 0 ? static_cast<std::size_t>(cfg.start)
                                           : std::min(mesh->minima_index[0] + 1, mesh->size() - 1);
  if (start >= mesh->size()) throw ConfigError("start state outside the mesh");
  const std::string pre = io::csv_preamble(cfg.to_json());

  struct Out {
    bool partition_ok = true;
    std::string summary;
  };
  std::vector<Out> outs(cfg.epsilon.size());
  parallel_for(cfg.epsilon.size(), [&](std::size_t k) {
    const double eps = cfg.epsilon[k];
    const auto dir = eps_dir(cfg, eps);
    const auto r = run_pipeline(mesh, q, cfg.alpha, eps);
    const auto K = committors(r.P);

    // Committors.
    std::string csv = pre + "state,value,well";
    for (std::size_t j = 1; j <= n; ++j) csv += ",K" + std::to_string(j);
    csv += "\n";
    double partition = 0.0, localization = 1.0;
    for (std::size_t x = 0; x < mesh->size(); ++x) {
      double s = 0.0;
      csv += std::to_string(x) + "," + format(mesh->states[x]) + "," + std::to_string(mesh->well[x]);
      for (std::size_t j = 0; j < n; ++j) {
        csv += "," + format(K[j][x]);
        s += K[j][x];
      }
      csv += "\n";
      partition = std::max(partition, std::abs(s - 1.0));
      localization = std::min(localization, K[mesh->well[x] - 1][x]);
    }
    io::write_atomic(dir / "committors.csv", csv);
    Out& o = outs[k];
    o.partition_ok = partition <= 1e-10;

    json res = envelope(cfg);
    res["epsilon"] = eps;
    res["seed"] = cfg.seed;
    res["partition_of_unity_error"] = partition;
    res["partition_of_unity"] = o.partition_ok ? "pass" : "fail";
    res["min_own_well_committor"] = localization;
    json items = json::array();
    for (const auto& e : r.vecs) {
      items.push_back({{"index", e.index}, {"eigenvalue", io::to_json(e.eigenvalue)},
                       {"residual", eigvec_residual(e.psi, K, *mesh)}});
    }
    res["eigenvectors"] = items;
    emit_json(dir / "eigvec_residuals.json", res);

    // Return times.
    const auto stats = return_time_stats(r.P, start, cfg.samples, cfg.seed, cfg.u, cfg.max_steps);
    json rt = envelope(cfg);
    rt["epsilon"] = eps;
    rt["return_times"] = io::to_json(stats);
    json exact = json::array();
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;  // one step, then the committor of the landing state
      for (std::size_t y = 0; y < mesh->size(); ++y) v += r.P.P(start, y) * K[j][y];
      exact.push_back(v);
    }
    rt["exact_committor_freq"] = exact;
    emit_json(dir / "return_times.json", rt);

    // Well-process rates.
    json wr = envelope(cfg);
    wr["epsilon"] = eps;
    wr["seed"] = cfg.seed;
    wr["limit_Q"] = io::to_json(q.Q);
    wr["stationary_law"] = pi;
    const double steps = std::ceil(cfg.horizon / r.P.time_unit());
    std::ostringstream line;
    line << "eps=" << eps << " partition of unity: " << (o.partition_ok ? "pass" : "fail");
    if (steps > cfg.max_mc_steps) {
      wr["skipped"] = "horizon needs " + format(steps) + " steps, above max_mc_steps";
      line << "  well rates: skipped (" << steps << " steps)";
    } else {
      const auto w = well_process_rates(r.P, mesh->minima_index[0], cfg.horizon, cfg.seed);
      bool within = true;
      json pairs = json::array();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          const double dev = std::abs(w.rates(i, j) - q.Q(i, j));
          const bool ok = dev <= 3.0 * w.ci_half_width(i, j);
          within = within && ok;
          pairs.push_back({{"from", i + 1}, {"to", j + 1}, {"estimate", w.rates(i, j)},
                           {"limit", q.Q(i, j)}, {"ci_half_width", w.ci_half_width(i, j)},
                           {"within_3ci", ok}});
        }
      }
      double occ = 0.0;
      for (std::size_t i = 0; i < n; ++i) occ = std::max(occ, std::abs(w.occupation[i] - pi[i]));
      wr["estimate"] = io::to_json(w);
      wr["off_diagonal"] = pairs;
      wr["verdict"] = within ? "pass" : "fail";
      wr["occupation_max_error"] = occ;
      std::string log = pre + "time,from,to\n";
      for (const auto& t : w.log) {
        log += format(t.time) + "," + std::to_string(t.from) + "," + std::to_string(t.to) + "\n";
      }
      io::write_atomic(dir / "well_log.csv", log);
      line << "  well rates vs Q within 3 CI: " << (within ? "pass" : "fail")
           << "  occupation error " << occ;
    }
    emit_json(dir / "well_rates.json", wr);
    o.summary = line.str();
  });
  bool ok = true;
  for (const auto& o : outs) {
    std::printf("%s\n", o.summary.c_str());
    ok = ok && o.partition_ok;
  }
  std::printf("seed=%llu\n", static_cast<unsigned long long>(cfg.seed));
  return ok ? 0 : 1;
}

int cmd_mesh_dump(const RunConfig& cfg) {
  const auto p = make_potential(cfg);
  const auto mesh = make_mesh(cfg, p);
  prepare_dir(cfg.out);
  std::ostringstream table;
  table << io::csv_preamble(cfg.to_json());
  write_table(table, *mesh);
  io::write_atomic(cfg.out / "mesh.txt", table.str());

  std::string csv = io::csv_preamble(cfg.to_json()) + "x,U,dU,well\n";
  for (std::size_t x = 0; x < mesh->size(); ++x) {
    const double s = mesh->states[x];
    csv += format(s) + "," + format(p.value(s)) + "," + format(p.deriv(s)) + "," +
           std::to_string(mesh->well[x]) + "\n";
  }
  io::write_atomic(cfg.out / "potential.csv", csv);

  json j = envelope(cfg);
  json pe = json::array();
  for (double eps : cfg.epsilon) pe.push_back({{"epsilon", eps}, {"p_eps", p_eps(*mesh, cfg.alpha, eps)}});
  j["mesh"] = {{"size", mesh->size()}, {"R", mesh->R}, {"h", mesh->h},
               {"delta", mesh->delta}, {"gamma", mesh->gamma}, {"minima_index", mesh->minima_index},
               {"t_max", t_max(*mesh)}, {"min_clearance", min_clearance(*mesh)}, {"p_eps", pe}};
  emit_json(cfg.out / "mesh.json", j);
  std::printf("N=%zu R=%g h=%.6g delta=%.6g gamma=%.6g t_max=%zu\n", mesh->size(), mesh->R, mesh->h,
              mesh->delta, mesh->gamma, t_max(*mesh));
  return 0;
}

int run(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app("metaspec: spectral metastability of a stable-driven multi-well chain", "metaspec");
  add_options(app, cfg);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  try {
    resolve(cfg);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "limit") return cmd_limit(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg);
    if (cfg.command == "paths") return cmd_paths(cfg);
    if (cfg.command == "mesh-dump") return cmd_mesh_dump(cfg);
    throw ConfigError("no command given");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace metaspec::cli
