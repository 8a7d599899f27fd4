#pragma once

#include <map>
#include <string>

#include "transhock/gas.hpp"
#include "transhock/iteration.hpp"
#include "transhock/nozzle.hpp"

namespace transhock {

enum class RunMode { LocateOnly, LinearOnly, Full };

std::string to_string(RunMode m);
RunMode run_mode_from_string(const std::string& s);

// Everything one run needs, parsed from a sectioned key = value file.
struct RunConfig {
  GasConstants gas;
  double upstream_p = 1.0;
  double upstream_mach = 2.0;
  // Alternative upstream description: a full state (p, q, S) with axial flow.
  // Resolved to (p, Mach) at parse time; the mass-flux normalization discards
  // the redundant degree of freedom anyway.
  double upstream_q = 0.0;  // 0 means "not given"
  double upstream_s = 0.0;
  bool upstream_full_state = false;

  double length = 1.0;
  double sigma = 0.0;
  std::string theta_expr;  // expression in x, or empty when theta_csv is set
  std::string theta_csv;
  std::string pressure_expr;
  std::string pressure_csv;

  int eta_nodes = 129;
  int supersonic_xi_nodes = 0;
  int subsonic_xi_nodes = 0;
  int scan_cells = 4096;

  double root_tol = 1e-12;
  double compat_tol = 1e-8;   // relative, see LinearOptions::compat_rel
  double iter_tol = 1e-10;
  double final_tol = 1e-8;

  RunMode mode = RunMode::Full;
  int threads = 0;  // 0: hardware concurrency
  std::string out_dir = "out";

  NozzleSpec make_spec() const;
  BackgroundShock make_shock() const;
  TransonicOptions make_transonic_options() const;
  LocatorOptions make_locator_options() const;

  // Canonical text round-trip: parsing the echo reproduces the config.
  std::string echo() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Dotted-path override, e.g. set_override(cfg, "run.mode", "locate-only").
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace transhock
