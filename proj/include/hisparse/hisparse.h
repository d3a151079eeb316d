/* Copyright 2026 The hisparse Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface to the hisparse library.
 *
 * Every function returns an hs_status. On failure, hs_last_error() gives a
 * message for the calling thread. Complex vectors are passed as interleaved
 * (re, im) doubles; lengths count complex entries. Strings returned through
 * char** are owned by the caller and released with hs_string_free. */

#ifndef HISPARSE_HISPARSE_H_
#define HISPARSE_HISPARSE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HS_BUILDING_LIBRARY)
#define HS_API __declspec(dllexport)
#else
#define HS_API __declspec(dllimport)
#endif
#else
#define HS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hs_status {
  HS_OK = 0,
  HS_ERR_DIMENSION = 1,
  HS_ERR_CAPACITY = 2,
  HS_ERR_CONFIG = 3,
  HS_ERR_DOMAIN = 4,
  HS_ERR_IO = 5,
  HS_ERR_INVALID_ARGUMENT = 6,
  HS_ERR_INTERNAL = 7
} hs_status;

typedef enum hs_format { HS_FORMAT_CSV = 0, HS_FORMAT_JSON = 1 } hs_format;

typedef struct hs_operator hs_operator;
typedef struct hs_solution hs_solution;
typedef struct hs_experiment hs_experiment;

HS_API const char* hs_version(void);
HS_API const char* hs_status_name(hs_status status);
/* Message of the last failed call on this thread; "" if none. */
HS_API const char* hs_last_error(void);
HS_API void hs_string_free(char* s);

/* ---- Measurement operator ------------------------------------------------
 * Subsampled delay-angle operator with N subcarriers, M antennas, D delay
 * taps and T slots. freq (length o_tau) and space (length o_theta) are
 * strictly increasing pilot indices. Input length M*D*T, output
 * O_theta*O_tau*T. */
HS_API hs_status hs_operator_create(size_t subcarriers, size_t antennas, size_t delay_taps,
                                    size_t slots, const size_t* freq, size_t o_tau,
                                    const size_t* space, size_t o_theta, hs_operator** out);
HS_API void hs_operator_destroy(hs_operator* op);
HS_API hs_status hs_operator_sizes(const hs_operator* op, size_t* input_size,
                                   size_t* output_size);
HS_API hs_status hs_operator_forward(const hs_operator* op, const double* in, size_t in_len,
                                     double* out, size_t out_len);
HS_API hs_status hs_operator_adjoint(const hs_operator* op, const double* in, size_t in_len,
                                     double* out, size_t out_len);

/* ---- Hierarchical thresholding -------------------------------------------
 * Pattern levels (blocks[k], sparsity[k]), level 0 outermost; x has
 * prod(blocks) entries. Writes the selected flat indices in increasing
 * order. HS_ERR_CAPACITY if more than `capacity` indices would be written;
 * *count is set either way. */
HS_API hs_status hs_hier_threshold(const double* x, size_t len, const size_t* blocks,
                                   const size_t* sparsity, size_t depth, size_t* indices,
                                   size_t capacity, size_t* count);

/* ---- Solvers -------------------------------------------------------------- */
typedef struct hs_solver_options {
  size_t max_iterations;     /* 0 selects 50 */
  double ls_tolerance;       /* <= 0 selects 1e-10 */
  size_t ls_max_iterations;  /* 0 selects 500 */
} hs_solver_options;

/* HiHTP with pattern ((M, s_angle), (D, s_delay), (T, T)). opts may be NULL. */
HS_API hs_status hs_hihtp(const hs_operator* op, const double* x, size_t x_len,
                          size_t s_angle, size_t s_delay, const hs_solver_options* opts,
                          hs_solution** out);
/* Plain HTP keeping `sparsity` coefficients. */
HS_API hs_status hs_htp(const hs_operator* op, const double* x, size_t x_len, size_t sparsity,
                        const hs_solver_options* opts, hs_solution** out);
HS_API void hs_solution_destroy(hs_solution* sol);
HS_API hs_status hs_solution_estimate(const hs_solution* sol, double* out, size_t len);
HS_API hs_status hs_solution_support(const hs_solution* sol, size_t* indices, size_t capacity,
                                     size_t* count);
HS_API hs_status hs_solution_stats(const hs_solution* sol, size_t* iterations,
                                   double* residual_norm, int* ls_converged);

/* ---- Experiments ---------------------------------------------------------
 * preset: "fig3", "fig4", "phase", "offgrid", or NULL for the one named by
 * config_json["experiment"] (default fig3). config_json (may be NULL)
 * overlays fields on the preset. */
HS_API hs_status hs_experiment_create(const char* preset, const char* config_json,
                                      hs_experiment** out);
HS_API void hs_experiment_destroy(hs_experiment* exp);
HS_API hs_status hs_experiment_set_seed(hs_experiment* exp, uint64_t seed);
HS_API hs_status hs_experiment_set_trials(hs_experiment* exp, size_t trials);
HS_API hs_status hs_experiment_set_threads(hs_experiment* exp, size_t threads);
/* Replaces the SNR list; pass INFINITY for noiseless. */
HS_API hs_status hs_experiment_set_snr(hs_experiment* exp, const double* snr_db, size_t count);
HS_API hs_status hs_experiment_set_output(hs_experiment* exp, const char* path, hs_format format);
HS_API hs_status hs_experiment_config_json(const hs_experiment* exp, char** json);
/* Runs the configured grid. Previous results are replaced. */
HS_API hs_status hs_experiment_run(hs_experiment* exp);
/* Runs the recovery-probability grid over (L, O_tau) and stores the trial
 * results; the grid is returned as JSON when `grid_json` is not NULL. */
HS_API hs_status hs_experiment_run_phase(hs_experiment* exp, char** grid_json);
HS_API hs_status hs_experiment_trial_count(const hs_experiment* exp, size_t* count);
HS_API hs_status hs_experiment_summary_json(const hs_experiment* exp, char** json);
/* path NULL uses the configured output path. */
HS_API hs_status hs_experiment_write(const hs_experiment* exp, const char* path,
                                     hs_format format);

/* ---- Analysis studies ----------------------------------------------------
 * study: "lemma1", "prop1", "hirip" or "theorem1". params_json may be NULL
 * for defaults. The report is a JSON document. */
HS_API hs_status hs_analysis_run(const char* study, const char* params_json, char** report);

#ifdef __cplusplus
}
#endif

#endif /* HISPARSE_HISPARSE_H_ */
