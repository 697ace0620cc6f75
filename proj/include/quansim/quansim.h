/*
 * quansim C API: decentralized multirobot quantile-estimation simulator with
 * utility-gated broadcast communication.
 *
 * All functions return a qs_status (QS_OK on success) or a handle/NULL.
 * On failure, qs_last_error() returns a thread-local message and
 * qs_last_status() the matching code. Handles are opaque and must be released
 * with their _free function. Strings returned as char* are owned by the caller
 * and released with qs_string_free().
 */
#ifndef QUANSIM_H
#define QUANSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qs_status {
    QS_OK = 0,
    QS_ERR_INVALID_ARGUMENT = 1,
    QS_ERR_PARSE = 2,
    QS_ERR_IO = 3,
    QS_ERR_SHAPE = 4,
    QS_ERR_BOUNDS = 5,
    QS_ERR_NUMERIC = 6,
    QS_ERR_PLACEMENT = 7,
    QS_ERR_DEGENERATE = 8,
    QS_ERR_INTERNAL = 9
} qs_status;

typedef struct qs_field qs_field;
typedef struct qs_config qs_config;
typedef struct qs_run qs_run;

const char* qs_version(void);

/* Thread-local error state, set by any failing call on the same thread. */
qs_status qs_last_status(void);
const char* qs_last_error(void);

void qs_string_free(char* s);

/* ---- field: load, generate, inspect ---- */

/* CSV matrix or PGM (P2/P5) raster; normalize min-max rescales into [0,1]. */
qs_status qs_field_load_raster(const char* path, int normalize, qs_field** out);

/* kind: "smoothed_noise" | "gaussian_blobs". Deterministic per seed. */
qs_status qs_field_generate(const char* kind, int width, int height, uint64_t seed,
                            qs_field** out);

qs_status qs_field_save_csv(const qs_field* field, const char* path);
int qs_field_width(const qs_field* field);
int qs_field_height(const qs_field* field);
double qs_field_value(const qs_field* field, int x, int y);

/* Empirical quantiles (linear interpolation between order statistics) of the
 * field values. levels must be strictly increasing in (0,1); out_values must
 * hold n_levels doubles. */
qs_status qs_field_true_quantiles(const qs_field* field, const double* levels, size_t n_levels,
                                  double* out_values);

void qs_field_free(qs_field* field);

/* ---- configuration ---- */

qs_status qs_config_default(qs_config** out);
qs_status qs_config_from_json(const char* json_text, qs_config** out);
qs_status qs_config_from_file(const char* path, qs_config** out);

/* Overlay a partial config (same schema) onto an existing one. */
qs_status qs_config_merge_json(qs_config* config, const char* json_text);

char* qs_config_to_json(const qs_config* config);
const char* qs_config_schema(void);
void qs_config_free(qs_config* config);

/* ---- single run ---- */

/* Executes one mission with the config's policy method, quantiles, and seed.
 * field may be NULL, in which case it is built from the config. */
qs_status qs_run_execute(const qs_config* config, const qs_field* field, qs_run** out);

int qs_run_step_count(const qs_run* run);
long qs_run_attempted(const qs_run* run);
long qs_run_successful(const qs_run* run);
double qs_run_final_rmse(const qs_run* run);

/* Final aggregated quantile estimates; returns the count written (<= cap). */
qs_status qs_run_final_estimates(const qs_run* run, double* out_values, size_t cap,
                                 size_t* out_count);

/* steps.csv, delivery.csv, summary.json under dir. */
qs_status qs_run_write_artifacts(const qs_run* run, const char* dir);
char* qs_run_summary_json(const qs_run* run);
void qs_run_free(qs_run* run);

/* ---- experiment pipeline ---- */

/* Full (method x quantile set x seed) matrix; writes per-run artifacts and
 * summary.csv/summary.json under out_dir. workers <= 0 uses all cores. */
qs_status qs_matrix_execute(const qs_config* config, const char* out_dir, int workers,
                            char** report_json);

/* Always-policy calibration runs; returns the percentile of observed finite
 * utilities per method family and writes thresholds.json under out_dir. */
qs_status qs_calibrate_execute(const qs_config* config, double percentile, const char* out_dir,
                               int workers, char** thresholds_json);

/* Summary table over run artifacts in runs_dir; baseline_dir (optional, may be
 * NULL) adds a paired one-sided Wilcoxon RMSE comparison per method. */
qs_status qs_analyze_runs(const char* runs_dir, const char* baseline_dir, char** report_json);

/* tradeoff.csv, cumulative_load.csv, transmissions.csv, rmse_box.csv. */
qs_status qs_emit_plot_data(const char* runs_dir, const char* out_dir);

/* ---- statistics ---- */

/* One-sided Wilcoxon signed-rank test (alternative: a < b) on n pairs. */
qs_status qs_wilcoxon_one_sided(const double* a, const double* b, size_t n, double* w_statistic,
                                double* p_value);

#ifdef __cplusplus
}
#endif

#endif /* QUANSIM_H */
