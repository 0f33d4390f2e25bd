#pragma once

#include "fatlas/config.hpp"

#include <iostream>

namespace fatlas {

enum ExitCode : int {
  kExitOk = 0,
  kExitBelowThreshold = 1,  // verify: phi_min < phi0
  kExitFailure = 2,         // validity, even-incidence or coloring failure
  kExitConfig = 3,          // config error, unreadable input, empty budget
};

struct CommandOptions {
  bool timestamp = true;  // timings and wall-clock time in reports
  std::ostream* log = &std::cerr;
  std::ostream* out = &std::cout;
};

// Each command writes its artifacts under config.out and returns an exit code.
// The last report is kept in `report` when given.
//   triangulate: mesh.off, mesh.obj, nerve.off, net.json, triangulate.json,
//                thickness.csv, stage_log.txt
//   qmmap:       qmmap.json, dilatation.csv (and mesh.off when it ran the pipeline)
//   bounds:      bounds.json, also printed
//   verify:      verify.json, thickness.csv
//   exhaust:     exhaust.json
int cmd_triangulate(const RunConfig& config, const CommandOptions& options, Json* report = nullptr);
int cmd_qmmap(const RunConfig& config, const CommandOptions& options, Json* report = nullptr);
int cmd_bounds(const RunConfig& config, const CommandOptions& options, Json* report = nullptr);
int cmd_verify(const RunConfig& config, const CommandOptions& options, Json* report = nullptr);
int cmd_exhaust(const RunConfig& config, const CommandOptions& options, Json* report = nullptr);

// Dispatches by name and maps errors to exit codes the way the command line
// does (config and input errors 3, other library errors 2).
int run_command(const std::string& name, const RunConfig& config, const CommandOptions& options,
                Json* report = nullptr);

// Full command line: fatlas <command> --config <path> [--seed N] [--eps X]
// [--out DIR] [--mesh PATH] [--phi0 X] [--no-timestamp].
int run_cli(int argc, const char* const* argv);

}  // namespace fatlas
