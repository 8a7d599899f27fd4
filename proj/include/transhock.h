/* transhock — transonic shock location and flow solver for almost-flat
 * nozzles with a prescribed receiver pressure.
 *
 * C interface of the shared library.  All functions are thread-safe as long
 * as each ts_run handle is used from one thread at a time; distinct handles
 * are fully independent.
 */
#ifndef TRANSHOCK_H
#define TRANSHOCK_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque pipeline handle. */
typedef struct ts_run ts_run;

/* Status codes; nonzero values double as CLI exit codes. */
typedef enum ts_status {
  TS_OK = 0,
  TS_E_CONFIG = 2,        /* unreadable/invalid configuration */
  TS_E_RANGE = 3,         /* receiver pressure outside the attainable range */
  TS_E_CONTRACTION = 4,   /* nonlinear iteration failed to contract */
  TS_E_SOLVABILITY = 5,   /* elliptic solvability condition violated */
  TS_E_INTERNAL = 6       /* anything else */
} ts_status;

/* Library version, e.g. "0.1.0". */
const char* ts_version(void);

/* Create a run from configuration text / file.  On failure returns NULL and,
 * when err_msg is non-NULL, stores a message there (free with ts_free). */
ts_run* ts_run_create(const char* config_text, char** err_msg);
ts_run* ts_run_create_from_file(const char* path, char** err_msg);
void ts_run_destroy(ts_run* run);

/* Dotted-key override, e.g. ts_run_set(run, "run.mode", "locate-only"). */
ts_status ts_run_set(ts_run* run, const char* key, const char* value);

/* Dry-run admissibility report as JSON (free with ts_free). */
ts_status ts_run_validate(ts_run* run, char** report_json);

/* Execute the pipeline, writing artifacts under out_dir (NULL: the
 * configured directory). */
ts_status ts_run_execute(ts_run* run, const char* out_dir);

/* Summary JSON of the last successful execute (free with ts_free). */
ts_status ts_run_summary(const ts_run* run, char** summary_json);

/* Message of the last error on this handle ("" when none); owned by the
 * handle, valid until the next call on it. */
const char* ts_run_error(const ts_run* run);

/* Canonical echo of the effective configuration (free with ts_free). */
ts_status ts_run_config_echo(const ts_run* run, char** config_text);

void ts_free(char* ptr);

#ifdef __cplusplus
}
#endif

#endif /* TRANSHOCK_H */
