#pragma once

// Resolved run configuration of the command-line front end.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "metaspec/error.hpp"
#include "metaspec/mesh.hpp"
#include "metaspec/report_io.hpp"

namespace CLI {
class App;
}

namespace metaspec::cli {

/// Invalid or inconsistent configuration; maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct MeshSpec {
  enum class Kind { uniform, adaptive } kind = Kind::uniform;
  double R = 5.0;
  std::size_t N = 203;
  double h = 10.0 / 203.0;
  double gamma = 0.0;
};

/// "uniform:R,N[,h]" (h defaults to 2R/N) or "adaptive:gamma".
MeshSpec parse_mesh_spec(const std::string& text);

struct RunConfig {
  std::string command;
  std::string potential = "builtin";  // builtin | poly:c0,c1,... | pw:FILE
  double kappa = kDefaultKinkWidth;
  std::string mesh_text = "uniform:5,203";
  MeshSpec mesh;
  Alignment align = Alignment::centered;
  double alpha = 1.8;
  std::vector<double> epsilon{1e-5};  // sorted descending
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";

  // sweep
  std::vector<double> lambda{-0.05, -0.3, -0.8};

  // paths
  long start = -1;  // state index of the return-time replicas; -1: the state right of m_1
  std::size_t samples = 10000;
  std::size_t max_steps = 1000000;
  std::vector<double> u;
  double horizon = 1e4;
  double max_mc_steps = 4e9;  // well-rate runs needing more steps are skipped

  /// Every parameter after resolution, embedded in each output file.
  io::json to_json() const;
};

/// Registers every option and subcommand on `app`, bound to `cfg`.
void add_options(CLI::App& app, RunConfig& cfg);

/// Checks the parsed values, sorts the epsilon list and parses the mesh spec.
void resolve(RunConfig& cfg);

/// Parses a full argument vector (program name excluded). Throws ConfigError.
RunConfig parse(const std::vector<std::string>& args);

/// Potential named by the config.
Potential make_potential(const RunConfig& cfg);

/// Mesh named by the config on `p`.
std::shared_ptr<const Mesh> make_mesh(const RunConfig& cfg, const Potential& p);

}  // namespace metaspec::cli
