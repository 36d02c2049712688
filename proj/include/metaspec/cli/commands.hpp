#pragma once

// Command dispatch of the front end. Exit codes: 0 success, 1 numeric
// failure, 2 config error.

#include <string>
#include <vector>

#include "metaspec/cli/config.hpp"

namespace metaspec::cli {

int cmd_spectrum(const RunConfig& cfg);
int cmd_limit(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_paths(const RunConfig& cfg);
int cmd_mesh_dump(const RunConfig& cfg);

/// Parses args (program name excluded), runs the command and maps errors to
/// exit codes with a diagnostic on standard error.
int run(const std::vector<std::string>& args);

}  // namespace metaspec::cli
