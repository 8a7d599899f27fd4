// Command-line front end; talks to the solver exclusively through the
// shared-library C interface.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "transhock.h"

namespace {

constexpr const char* kEnvPrefix = "TRANSHOCK_";

// CLI flag > environment variable > config file.
void apply_env_overrides(ts_run* run) {
  static const struct {
    const char* env;
    const char* key;
  } kMap[] = {
      {"MODE", "run.mode"},       {"THREADS", "run.threads"},
      {"OUT", "run.out"},         {"SEED_GRID", "grids.scan_cells"},
      {"ETA_NODES", "grids.eta_nodes"},
  };
  for (const auto& m : kMap) {
    const std::string name = std::string(kEnvPrefix) + m.env;
    if (const char* v = std::getenv(name.c_str())) {
      if (ts_run_set(run, m.key, v) != TS_OK) {
        std::fprintf(stderr, "error: %s=%s: %s\n", name.c_str(), v, ts_run_error(run));
        std::exit(TS_E_CONFIG);
      }
    }
  }
}

struct Flags {
  std::string config;
  std::string out;
  std::string mode;
  int threads = -1;
  int seed_grid = -1;
};

ts_run* make_run(const Flags& f) {
  char* err = nullptr;
  ts_run* run = ts_run_create_from_file(f.config.c_str(), &err);
  if (!run) {
    std::fprintf(stderr, "error: %s\n", err ? err : "cannot load config");
    ts_free(err);
    std::exit(TS_E_CONFIG);
  }
  apply_env_overrides(run);
  auto set_or_die = [&](const char* key, const std::string& value) {
    if (ts_run_set(run, key, value.c_str()) != TS_OK) {
      std::fprintf(stderr, "error: --%s: %s\n", key, ts_run_error(run));
      std::exit(TS_E_CONFIG);
    }
  };
  if (!f.mode.empty()) set_or_die("run.mode", f.mode);
  if (f.threads >= 0) set_or_die("run.threads", std::to_string(f.threads));
  if (f.seed_grid > 0) set_or_die("grids.scan_cells", std::to_string(f.seed_grid));
  if (!f.out.empty()) set_or_die("run.out", f.out);
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transonic shock locator and solver for almost-flat nozzles"};
  app.require_subcommand(0, 1);

  Flags flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config, "configuration file")->required();
    cmd->add_option("--out", flags.out, "output directory (overrides the config)");
    cmd->add_option("--mode", flags.mode, "locate-only | linear-only | full");
    cmd->add_option("--threads", flags.threads, "worker threads (0 = hardware)");
    cmd->add_option("--seed-grid", flags.seed_grid, "root-scan cells for the location sweep");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "execute the pipeline (default)");
  add_common(cmd_run);
  CLI::App* cmd_validate = app.add_subcommand("validate", "dry-run admissibility report");
  add_common(cmd_validate);

  CLI11_PARSE(app, argc, argv);
  if (app.get_subcommands().empty()) {
    std::fprintf(stderr, "usage: transhock [run|validate] --config <path> [options]\n");
    return TS_E_CONFIG;
  }

  ts_run* run = make_run(flags);
  int rc = 0;
  if (cmd_validate->parsed()) {
    char* report = nullptr;
    const ts_status st = ts_run_validate(run, &report);
    if (st == TS_OK && report) {
      std::fputs(report, stdout);
    } else {
      std::fprintf(stderr, "error: %s\n", ts_run_error(run));
      rc = st;
    }
    ts_free(report);
  } else {
    const ts_status st = ts_run_execute(run, flags.out.empty() ? nullptr : flags.out.c_str());
    if (st == TS_OK) {
      char* summary = nullptr;
      ts_run_summary(run, &summary);
      if (summary) std::fputs(summary, stdout);
      ts_free(summary);
    } else {
      std::fprintf(stderr, "error: %s\n", ts_run_error(run));
      rc = st;
    }
  }
  ts_run_destroy(run);
  return rc;
}
