#ifndef SMDR_SMDR_H
#define SMDR_SMDR_H

#include <stddef.h>
#include <stdint.h>

#if defined(SMDR_BUILDING_LIBRARY)
#define SMDR_API __attribute__((visibility("default")))
#else
#define SMDR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smdr_status {
  SMDR_OK = 0,
  SMDR_ERR_INVALID_ARGUMENT = 1,
  SMDR_ERR_IO = 2,
  SMDR_ERR_DATA = 3,
  SMDR_ERR_NUMERICAL = 4,
  SMDR_ERR_INTERNAL = 5
} smdr_status;

typedef struct smdr_grid smdr_grid;
typedef struct smdr_analysis smdr_analysis;
typedef struct smdr_selection smdr_selection;
typedef struct smdr_benchmark smdr_benchmark;

/* Message of the last failed call on this thread; "" if none. */
SMDR_API const char* smdr_last_error(void);
SMDR_API const char* smdr_version(void);

/* Grids. `values` is row-major, width * height doubles. */
SMDR_API smdr_status smdr_grid_create(size_t width, size_t height, const double* values,
                                      smdr_grid** out);
SMDR_API smdr_status smdr_grid_read(const char* path, smdr_grid** out);
SMDR_API smdr_status smdr_grid_write(const smdr_grid* grid, const char* path);
SMDR_API void smdr_grid_free(smdr_grid* grid);
SMDR_API size_t smdr_grid_width(const smdr_grid* grid);
SMDR_API size_t smdr_grid_height(const smdr_grid* grid);
SMDR_API const double* smdr_grid_values(const smdr_grid* grid);
SMDR_API int smdr_grid_has_truth(const smdr_grid* grid);
/* Copies width * height 0/1 flags into `out`. */
SMDR_API smdr_status smdr_grid_truth(const smdr_grid* grid, uint8_t* out);
SMDR_API smdr_status smdr_grid_write_truth_pgm(const smdr_grid* grid, const char* path);

/* Simulation scenarios: well_pure, well_noisy, poor_pure, poor_noisy. */
SMDR_API size_t smdr_scenario_count(void);
SMDR_API const char* smdr_scenario_tag(size_t index);
SMDR_API smdr_status smdr_simulate(const char* scenario, uint64_t seed, uint64_t replication,
                                   smdr_grid** out);

typedef struct smdr_analysis_options {
  const double* lambdas; /* NULL: default grid */
  size_t lambda_count;
  int empirical_null;    /* 0: standard normal null */
  size_t pr_sweeps;
  uint64_t pr_seed;
  double fit_tol;
  size_t fit_max_iter;
} smdr_analysis_options;

SMDR_API void smdr_analysis_options_init(smdr_analysis_options* opts);

/* Densities, lambda path, prior fit and posterior in one call. */
SMDR_API smdr_status smdr_analyze(const smdr_grid* grid, const smdr_analysis_options* opts,
                                  smdr_analysis** out);
SMDR_API void smdr_analysis_free(smdr_analysis* analysis);
SMDR_API double smdr_analysis_lambda(const smdr_analysis* analysis);
SMDR_API double smdr_analysis_s_hat(const smdr_analysis* analysis);
SMDR_API size_t smdr_analysis_node_count(const smdr_analysis* analysis);
SMDR_API size_t smdr_analysis_plateau_count(const smdr_analysis* analysis);
SMDR_API size_t smdr_analysis_iterations(const smdr_analysis* analysis);
SMDR_API int smdr_analysis_converged(const smdr_analysis* analysis);
SMDR_API const double* smdr_analysis_prior(const smdr_analysis* analysis);
SMDR_API const double* smdr_analysis_posterior(const smdr_analysis* analysis);
SMDR_API size_t smdr_analysis_path_length(const smdr_analysis* analysis);
SMDR_API smdr_status smdr_analysis_path_entry(const smdr_analysis* analysis, size_t index,
                                              double* lambda, double* bic, size_t* plateaus);

/* Selections. */
SMDR_API smdr_status smdr_screen(const smdr_analysis* analysis, double beta,
                                 smdr_selection** out);
SMDR_API smdr_status smdr_fdr_smoothing(const smdr_analysis* analysis, double alpha,
                                        smdr_selection** out);
SMDR_API smdr_status smdr_bh(const smdr_grid* grid, double alpha, smdr_selection** out);
/* `s_hat` may be NULL. */
SMDR_API smdr_status smdr_mdr_independent(const smdr_grid* grid, double beta,
                                          smdr_selection** out, double* s_hat);
/* Reads a PGM mask (pixels below 128 are selected). */
SMDR_API smdr_status smdr_mask_read(const char* path, smdr_selection** out);
SMDR_API void smdr_selection_free(smdr_selection* selection);
SMDR_API size_t smdr_selection_size(const smdr_selection* selection);
SMDR_API size_t smdr_selection_width(const smdr_selection* selection);
SMDR_API size_t smdr_selection_height(const smdr_selection* selection);
SMDR_API const uint8_t* smdr_selection_mask(const smdr_selection* selection);
SMDR_API size_t smdr_selection_count(const smdr_selection* selection);
SMDR_API size_t smdr_selection_j_star(const smdr_selection* selection);
SMDR_API const char* smdr_selection_method(const smdr_selection* selection);
/* BMDR of every prefix, length + 1 entries when present; NULL otherwise. */
SMDR_API const double* smdr_selection_trace(const smdr_selection* selection, size_t* length);
SMDR_API smdr_status smdr_selection_write_pgm(const smdr_selection* selection, const char* path);
SMDR_API smdr_status smdr_selection_write_trace(const smdr_selection* selection,
                                                const char* path);
SMDR_API smdr_status smdr_evaluate(const smdr_selection* selection, const smdr_grid* truth,
                                   double* fnp, double* fdp, double* fm);

/* Mask image, or the four-level comparison map when `truth_path` is set. */
SMDR_API smdr_status smdr_render(const char* mask_path, const char* truth_path,
                                 const char* out_path);

typedef struct smdr_benchmark_options {
  const char* const* scenarios;
  size_t scenario_count;
  const char* const* methods; /* smdr, fdrs, bh, mdr */
  const double* levels;       /* one per method */
  size_t method_count;
  size_t replications;
  uint64_t seed;
  size_t threads;             /* 0: available parallelism */
} smdr_benchmark_options;

/* Receives each finished cell as one JSON object. */
typedef void (*smdr_record_callback)(const char* json, void* user);

SMDR_API smdr_status smdr_benchmark_run(const smdr_benchmark_options* opts,
                                        smdr_record_callback callback, void* user,
                                        smdr_benchmark** out);
SMDR_API void smdr_benchmark_free(smdr_benchmark* bench);
SMDR_API size_t smdr_benchmark_record_count(const smdr_benchmark* bench);
SMDR_API const char* smdr_benchmark_record_json(const smdr_benchmark* bench, size_t index);
SMDR_API const char* smdr_benchmark_table(const smdr_benchmark* bench);

/* Writes through a temporary file and a rename. */
SMDR_API smdr_status smdr_write_file_atomic(const char* path, const char* data, size_t length);

#ifdef __cplusplus
}
#endif

#endif
