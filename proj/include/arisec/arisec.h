/* Copyright 2026 The arisec Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the arisec library. All objects are opaque handles owned by the caller
 * and released with the matching *_free function. Every fallible call returns an
 * arisec_status; on failure arisec_last_error() describes the problem (per thread).
 * Strings returned through char** are released with arisec_string_free.
 */
#ifndef ARISEC_ARISEC_H_
#define ARISEC_ARISEC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ARISEC_BUILDING_LIBRARY)
#define ARISEC_API __attribute__((visibility("default")))
#else
#define ARISEC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum arisec_status {
  ARISEC_OK = 0,
  ARISEC_ERR_PARSE = 1,
  ARISEC_ERR_INVALID_CONFIG = 2,
  ARISEC_ERR_DIMENSION = 3,
  ARISEC_ERR_IO = 4,
  ARISEC_ERR_INFEASIBLE = 5,
  ARISEC_ERR_NUMERICAL = 6,
  ARISEC_ERR_ARGUMENT = 7,
  ARISEC_ERR_INTERNAL = 8
} arisec_status;

typedef struct arisec_config arisec_config;
typedef struct arisec_run arisec_run;
typedef struct arisec_experiment arisec_experiment;
typedef struct arisec_table arisec_table;

/* Library version, "major.minor.patch". */
ARISEC_API const char* arisec_version(void);
/* Message of the last failed call on this thread; "" when none. */
ARISEC_API const char* arisec_last_error(void);
ARISEC_API const char* arisec_status_name(arisec_status status);
ARISEC_API void arisec_string_free(char* text);

/* ---- scenario configuration ---- */

/* preset: "desk" or "full". */
ARISEC_API arisec_status arisec_config_new(const char* preset, arisec_config** out);
/* Parses key = value text on top of the full-scale defaults and validates it. */
ARISEC_API arisec_status arisec_config_parse(const char* text, arisec_config** out);
ARISEC_API arisec_status arisec_config_load(const char* path, arisec_config** out);
ARISEC_API arisec_status arisec_config_set(arisec_config* config, const char* key, const char* value);
ARISEC_API arisec_status arisec_config_validate(const arisec_config* config);
ARISEC_API arisec_status arisec_config_dump(const arisec_config* config, char** out_text);
/* One line per accepted key with its unit. */
ARISEC_API arisec_status arisec_config_schema(char** out_text);
ARISEC_API void arisec_config_free(arisec_config* config);

/* ---- single optimization run ---- */

typedef struct arisec_run_summary {
  double objective;        /* sum over groups of the minimum intended rate, bit/s/Hz */
  double sum_rate;         /* sum of every intended user's rate */
  double max_eaves_rate;   /* largest eavesdropper rate */
  double wiretap_residual; /* max over groups of (eavesdropper rate - threshold) */
  double power_residual;   /* (total power - budget) / budget */
  int feasible;
  int converged;
  int outer_iterations;
  int audit_violations;
  uint64_t channel_hash;
} arisec_run_summary;

/* scheme: "proposed", "fixed-deployment" or "without-ris". */
ARISEC_API arisec_status arisec_run_bcd(const arisec_config* config, uint64_t seed, const char* scheme,
                                        arisec_run** out);
ARISEC_API arisec_status arisec_run_get_summary(const arisec_run* run, arisec_run_summary* out);
/* Copies up to `capacity` values; `count` receives the number available. */
ARISEC_API arisec_status arisec_run_group_rates(const arisec_run* run, double* out, size_t capacity, size_t* count);
/* ARIS positions as x0, y0, x1, y1, ... (meters). */
ARISEC_API arisec_status arisec_run_positions(const arisec_run* run, double* out, size_t capacity, size_t* count);
/* Association as a row-major J x K 0/1 matrix. */
ARISEC_API arisec_status arisec_run_association(const arisec_run* run, double* out, size_t capacity, size_t* count);
/* Per outer iteration objective values. */
ARISEC_API arisec_status arisec_run_trace(const arisec_run* run, double* out, size_t capacity, size_t* count);
ARISEC_API void arisec_run_free(arisec_run* run);

/* ---- experiments ---- */

ARISEC_API arisec_status arisec_experiment_load(const char* path, arisec_experiment** out);
ARISEC_API arisec_status arisec_experiment_parse(const char* text, const char* base_dir, arisec_experiment** out);
/* Desk-scale preset for figure 3, 4, 5, 6 or 7. */
ARISEC_API arisec_status arisec_experiment_figure(int figure, arisec_experiment** out);
ARISEC_API arisec_status arisec_experiment_set_trials(arisec_experiment* experiment, int trials);
ARISEC_API arisec_status arisec_experiment_set_seed(arisec_experiment* experiment, uint64_t seed);
/* Overrides one scenario key for every grid point. */
ARISEC_API arisec_status arisec_experiment_set_scenario(arisec_experiment* experiment, const char* key,
                                                        const char* value);
ARISEC_API arisec_status arisec_experiment_name(const arisec_experiment* experiment, char** out_text);
ARISEC_API arisec_status arisec_experiment_grid_size(const arisec_experiment* experiment, size_t* out);
ARISEC_API void arisec_experiment_free(arisec_experiment* experiment);

typedef void (*arisec_progress_fn)(size_t done, size_t total, void* user);

ARISEC_API arisec_status arisec_experiment_run(const arisec_experiment* experiment, int workers,
                                               arisec_progress_fn progress, void* user, arisec_table** out);

/* ---- results ---- */

ARISEC_API arisec_status arisec_table_row_count(const arisec_table* table, size_t* out);
ARISEC_API arisec_status arisec_table_failed_count(const arisec_table* table, size_t* out);
ARISEC_API arisec_status arisec_table_to_csv(const arisec_table* table, char** out_text);
ARISEC_API arisec_status arisec_table_to_json(const arisec_table* table, char** out_text);
ARISEC_API arisec_status arisec_table_from_json(const char* text, arisec_table** out);
/* Mean objective per grid point and scheme, as CSV text. */
ARISEC_API arisec_status arisec_table_summary_csv(const arisec_table* table, char** out_text);
/* Writes <stem>.csv, <stem>.json and, when timing != 0, <stem>.timing.csv into dir. */
ARISEC_API arisec_status arisec_table_write(const arisec_table* table, const char* dir, const char* stem,
                                            int timing);
ARISEC_API void arisec_table_free(arisec_table* table);

#ifdef __cplusplus
}
#endif

#endif /* ARISEC_ARISEC_H_ */
