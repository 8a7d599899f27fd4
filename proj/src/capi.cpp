#include "transhock.h"

#include <memory>
#include <cstring>
#include <string>

#include "transhock/runner.hpp"

using namespace transhock;

struct ts_run {
  RunConfig cfg;
  std::string last_error;
  std::string last_summary;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ts_status status_of(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return TS_E_CONFIG;
  if (dynamic_cast<const SolvabilityError*>(&e)) return TS_E_SOLVABILITY;
  if (dynamic_cast<const ContractionError*>(&e)) return TS_E_CONTRACTION;
  return TS_E_INTERNAL;
}

}  // namespace

extern "C" {

const char* ts_version(void) { return "0.1.0"; }

ts_run* ts_run_create(const char* config_text, char** err_msg) {
  if (err_msg) *err_msg = nullptr;
  if (!config_text) {
    if (err_msg) *err_msg = dup_string("null configuration text");
    return nullptr;
  }
  try {
    auto run = std::make_unique<ts_run>();
    run->cfg = parse_config(config_text);
    return run.release();
  } catch (const std::exception& e) {
    if (err_msg) *err_msg = dup_string(e.what());
    return nullptr;
  }
}

ts_run* ts_run_create_from_file(const char* path, char** err_msg) {
  if (err_msg) *err_msg = nullptr;
  if (!path) {
    if (err_msg) *err_msg = dup_string("null configuration path");
    return nullptr;
  }
  try {
    auto run = std::make_unique<ts_run>();
    run->cfg = load_config(path);
    return run.release();
  } catch (const std::exception& e) {
    if (err_msg) *err_msg = dup_string(e.what());
    return nullptr;
  }
}

void ts_run_destroy(ts_run* run) { delete run; }

ts_status ts_run_set(ts_run* run, const char* key, const char* value) {
  if (!run || !key || !value) return TS_E_CONFIG;
  try {
    apply_override(run->cfg, key, value);
    run->cfg.make_spec();  // re-validate profile expressions
    run->last_error.clear();
    return TS_OK;
  } catch (const std::exception& e) {
    run->last_error = e.what();
    return TS_E_CONFIG;
  }
}

ts_status ts_run_validate(ts_run* run, char** report_json) {
  if (!run) return TS_E_CONFIG;
  if (report_json) *report_json = nullptr;
  try {
    const std::string report = validate_config(run->cfg);
    if (report_json) *report_json = dup_string(report);
    run->last_error.clear();
    return TS_OK;
  } catch (const std::exception& e) {
    run->last_error = e.what();
    return status_of(e);
  }
}

ts_status ts_run_execute(ts_run* run, const char* out_dir) {
  if (!run) return TS_E_CONFIG;
  try {
    const std::string out = out_dir ? out_dir : run->cfg.out_dir;
    const RunOutcome outcome = run_pipeline(run->cfg, out);
    run->last_summary = outcome.summary_json;
    run->last_error = outcome.message;
    return static_cast<ts_status>(outcome.status);
  } catch (const std::exception& e) {
    run->last_error = e.what();
    return status_of(e);
  }
}

ts_status ts_run_summary(const ts_run* run, char** summary_json) {
  if (!run || !summary_json) return TS_E_CONFIG;
  *summary_json = dup_string(run->last_summary);
  return TS_OK;
}

const char* ts_run_error(const ts_run* run) {
  return run ? run->last_error.c_str() : "null handle";
}

ts_status ts_run_config_echo(const ts_run* run, char** config_text) {
  if (!run || !config_text) return TS_E_CONFIG;
  *config_text = dup_string(run->cfg.echo());
  return TS_OK;
}

void ts_free(char* ptr) { delete[] ptr; }

}  // extern "C"
