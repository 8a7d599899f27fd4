#pragma once

#include <string>

#include "transhock/config.hpp"

namespace transhock {

// Process-level status codes, shared with the C API and the CLI exit codes.
enum class RunStatus : int {
  Ok = 0,
  ConfigError = 2,
  PstarOutOfRange = 3,
  NoContraction = 4,
  SolvabilityFailure = 5,
  InternalFailure = 6,
};

struct RunOutcome {
  RunStatus status = RunStatus::Ok;
  std::string message;
  std::string summary_json;  // written to <out>/summary.json on success
};

// Dry-run checks: upstream admissibility, range condition, inlet
// compatibility, stability of the default grids; returns a JSON report.
std::string validate_config(const RunConfig& cfg);

// Locate -> linear seed -> nonlinear solve per root (as the mode requests),
// writing locations.json, per-root artifacts, and summary.json under out_dir.
// Failures leave a diagnostics.json instead of partial summaries.
RunOutcome run_pipeline(const RunConfig& cfg, const std::string& out_dir);

}  // namespace transhock
