#pragma once

#include "fsir/config.hpp"

namespace fsir {

// Exit codes shared by the CLI and the command helpers.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

// Subcommand bodies.  Each reads and writes the conventional file names
// inside cfg.outputs.directory (dataset.csv, observation_points.json,
// result.json, slice_means.json, oracle_compare.json, diagnostics.json);
// every JSON output embeds the resolved config and a format version, and
// CSV outputs carry a .meta.json sidecar with the same.
void cmd_simulate(const RunConfig& cfg);
void cmd_fit(const RunConfig& cfg);
void cmd_oracle_compare(const RunConfig& cfg);
void cmd_diagnose(const RunConfig& cfg);

// Full argv-level entry point; maps errors to exit codes
// (0 ok, 2 config, 3 I/O, 4 numerical).
int run_cli(int argc, const char* const* argv);

}  // namespace fsir
