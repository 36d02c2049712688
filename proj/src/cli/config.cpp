#include "metaspec/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

namespace metaspec::cli {
namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + item + "' is not a number");
    }
  }
  return out;
}

// INI values containing commas arrive as several items; rejoin them.
std::function<void(const std::vector<std::string>&)> joined(std::string& target) {
  return [&target](const std::vector<std::string>& parts) {
    target.clear();
    for (std::size_t i = 0; i < parts.size(); ++i) target += (i ? "," : "") + parts[i];
  };
}

}  // namespace

MeshSpec parse_mesh_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("mesh: expected uniform:R,N[,h] or adaptive:gamma, got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const auto v = parse_numbers(text.substr(colon + 1), "mesh");
  MeshSpec m;
  if (kind == "uniform") {
    if (v.size() != 2 && v.size() != 3) throw ConfigError("mesh: uniform takes R,N or R,N,h");
    if (!(v[0] > 0.0)) throw ConfigError("mesh: R must be positive");
    if (!(v[1] >= 2.0) || v[1] != std::floor(v[1])) throw ConfigError("mesh: N must be an integer >= 2");
    m.kind = MeshSpec::Kind::uniform;
    m.R = v[0];
    m.N = static_cast<std::size_t>(v[1]);
    m.h = v.size() == 3 ? v[2] : 2.0 * m.R / static_cast<double>(m.N);
    if (!(m.h > 0.0)) throw ConfigError("mesh: h must be positive");
  } else if (kind == "adaptive") {
    if (v.size() != 1) throw ConfigError("mesh: adaptive takes a single gamma");
    if (!(v[0] > 0.0)) throw ConfigError("mesh: gamma must be positive");
    m.kind = MeshSpec::Kind::adaptive;
    m.gamma = v[0];
  } else {
    throw ConfigError("mesh: unknown kind '" + kind + "'");
  }
  return m;
}

io::json RunConfig::to_json() const {
  io::json mesh_json = {{"kind", mesh.kind == MeshSpec::Kind::uniform ? "uniform" : "adaptive"}};
  if (mesh.kind == MeshSpec::Kind::uniform) {
    mesh_json["R"] = mesh.R;
    mesh_json["N"] = mesh.N;
    mesh_json["h"] = mesh.h;
    mesh_json["align"] = std::string(to_string(align));
  } else {
    mesh_json["gamma"] = mesh.gamma;
  }
  io::json j = {{"command", command},
                {"potential", potential},
                {"kappa", kappa},
                {"mesh", mesh_json},
                {"alpha", alpha},
                {"epsilon", epsilon},
                {"seed", seed},
                {"version", io::version()}};
  if (command == "sweep") j["lambda"] = lambda;
  if (command == "paths") {
    j["start"] = start;
    j["samples"] = samples;
    j["max_steps"] = max_steps;
    j["u"] = u;
    j["horizon"] = horizon;
    j["max_mc_steps"] = max_mc_steps;
  }
  return j;
}

void add_options(CLI::App& app, RunConfig& cfg) {
  app.set_config("--config", "", "INI/TOML file; [sweep] and [paths] sections feed those commands");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option_function<std::vector<std::string>>("--potential", joined(cfg.potential),
                                                    "builtin | poly:c0,c1,... | pw:FILE");
  app.add_option("--kappa", cfg.kappa, "half-width of the smoothed kinks of the builtin example");
  app.add_option_function<std::vector<std::string>>("--mesh", joined(cfg.mesh_text),
                                                    "uniform:R,N[,h] | adaptive:gamma");
  app.add_option_function<std::string>(
      "--align", [&cfg](const std::string& s) { cfg.align = parse_alignment(s); },
      "centered | nearest placement of the minima on a uniform mesh");
  app.add_option("--alpha", cfg.alpha, "stability index in (0, 2)");
  app.add_option("--epsilon", cfg.epsilon, "noise level; repeatable")->delimiter(',');
  app.add_option("--seed", cfg.seed, "Monte Carlo seed");
  app.add_option("--out", cfg.out, "output directory");

  app.add_subcommand("spectrum", "eigenvalues and eigenvectors of Q^eps per epsilon");
  app.add_subcommand("limit", "limit generator Q, its spectrum and eigenvectors");
  auto* sweep = app.add_subcommand("sweep", "convergence rates over the epsilon list");
  sweep->add_option("--lambda", cfg.lambda, "characteristic polynomial arguments")->delimiter(',');
  auto* paths = app.add_subcommand("paths", "committors, return times and well-process rates");
  paths->add_option("--start", cfg.start, "state index for the return-time replicas");
  paths->add_option("--samples", cfg.samples, "return-time replicas");
  paths->add_option("--max-steps", cfg.max_steps, "step cap per replica");
  paths->add_option("--u", cfg.u, "Laplace arguments")->delimiter(',');
  paths->add_option("--horizon", cfg.horizon, "well-process horizon in rescaled time");
  paths->add_option("--max-mc-steps", cfg.max_mc_steps, "skip well-rate runs longer than this");
  app.add_subcommand("mesh-dump", "state table of the mesh");
  for (auto* sub : app.get_subcommands({})) {
    sub->callback([&cfg, sub] { cfg.command = sub->get_name(); });
  }
}

void resolve(RunConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) {
    std::ostringstream os;
    os << "alpha must lie in (0, 2), got " << cfg.alpha;
    throw ConfigError(os.str());
  }
  if (cfg.epsilon.empty()) throw ConfigError("epsilon list is empty");
  for (double e : cfg.epsilon) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("epsilon values must be positive");
  }
  std::sort(cfg.epsilon.begin(), cfg.epsilon.end(), std::greater<>());
  if (std::adjacent_find(cfg.epsilon.begin(), cfg.epsilon.end()) != cfg.epsilon.end()) {
    throw ConfigError("epsilon list has repeated values");
  }
  if (!(cfg.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (cfg.samples == 0) throw ConfigError("samples must be positive");
  cfg.mesh = parse_mesh_spec(cfg.mesh_text);
}

RunConfig parse(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app("metaspec");
  add_options(app, cfg);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  resolve(cfg);
  return cfg;
}

Potential make_potential(const RunConfig& cfg) {
  const std::string& s = cfg.potential;
  try {
    if (s == "builtin") return example_potential(cfg.kappa);
    if (s.rfind("poly:", 0) == 0) return polynomial_potential(parse_numbers(s.substr(5), "potential"));
    if (s.rfind("pw:", 0) == 0) {
      return piecewise_linear_potential(read_knot_table(s.substr(3)), cfg.kappa, s);
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("potential: expected builtin, poly:c0,c1,... or pw:FILE, got '" + s + "'");
}

std::shared_ptr<const Mesh> make_mesh(const RunConfig& cfg, const Potential& p) {
  if (cfg.mesh.kind == MeshSpec::Kind::adaptive) {
    return std::make_shared<const Mesh>(build_adaptive(p, cfg.mesh.gamma));
  }
  return std::make_shared<const Mesh>(build_uniform(p, cfg.mesh.R, cfg.mesh.N, cfg.mesh.h, cfg.align));
}

}  // namespace metaspec::cli
