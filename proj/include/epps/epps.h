#ifndef EPPS_EPPS_H
#define EPPS_EPPS_H

#include <stddef.h>
#include <stdint.h>

#if defined(EPPS_BUILDING_LIBRARY)
#define EPPS_API __attribute__((visibility("default")))
#else
#define EPPS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum epps_status {
  EPPS_OK = 0,
  EPPS_E_USAGE = 1,    /* bad arguments or configuration */
  EPPS_E_DATA = 2,     /* unreadable, malformed or insufficient input */
  EPPS_E_NUMERIC = 3,  /* numerical degeneracy */
  EPPS_E_INTERNAL = 4,
} epps_status;

typedef enum epps_estimator {
  EPPS_PLAIN = 0,
  EPPS_HAYASHI_YOSHIDA = 1,
  EPPS_ASYNC = 2,
  EPPS_TICK = 3,
  EPPS_TICK_APPROX = 4,
  EPPS_COMBINED = 5,
  EPPS_COMBINED_APPROX = 6,
} epps_estimator;

#define EPPS_N_ESTIMATORS 7

typedef enum epps_prior { EPPS_PRIOR_TRIANGULAR = 0, EPPS_PRIOR_UNIFORM = 1 } epps_prior;

typedef enum epps_moments_mode {
  EPPS_MOMENTS_AUTO = 0,
  EPPS_MOMENTS_NULL = 1,
  EPPS_MOMENTS_UNIFORM_NULL = 2,
  EPPS_MOMENTS_INTERPOLATED = 3,
} epps_moments_mode;

typedef struct epps_ticks epps_ticks;
typedef struct epps_curve epps_curve;
typedef struct epps_ensemble epps_ensemble;
typedef struct epps_moments epps_moments;

/* Message of the last failure on the calling thread ("" if none). */
EPPS_API const char* epps_last_error(void);

EPPS_API const char* epps_estimator_name(epps_estimator e);
/* Accepts the names above and "hy". */
EPPS_API epps_status epps_estimator_parse(const char* name, epps_estimator* out);

/* ---- trades ---- */

typedef struct epps_csv_options {
  double tick_size;
  const char* symbol; /* NULL or "": file must hold one symbol */
  int has_session_begin;
  int64_t session_begin;
  int has_session_end;
  int64_t session_end;
  int allow_off_grid;
} epps_csv_options;

EPPS_API void epps_csv_options_init(epps_csv_options* opt);
EPPS_API epps_status epps_ticks_load(const char* path, const epps_csv_options* opt,
                                     epps_ticks** out);
EPPS_API epps_status epps_ticks_write(const epps_ticks* ticks, const char* path);
EPPS_API size_t epps_ticks_size(const epps_ticks* ticks);
EPPS_API double epps_ticks_tick_size(const epps_ticks* ticks);
/* Price in currency units (ticks times tick size). */
EPPS_API epps_status epps_ticks_get(const epps_ticks* ticks, size_t i, int64_t* time,
                                    double* price);
EPPS_API void epps_ticks_free(epps_ticks* ticks);

/* ---- simulator ---- */

typedef struct epps_sim_options {
  double alpha0, alpha1, beta1;
  double c;
  size_t n_steps;
  uint64_t seed;
  size_t burn_in;
  int per_stock_volatility; /* 0: one shared variance process */
  double start_price;       /* in ticks */
  double mean_wait[2];
  int rounding;
  double q_scale;
  double base_tick_size;
  double return_scale;
  size_t max_redraws;
} epps_sim_options;

EPPS_API void epps_sim_options_init(epps_sim_options* opt);
EPPS_API epps_status epps_simulate_pair(const epps_sim_options* opt, epps_ticks** a,
                                        epps_ticks** b);

/* ---- sweep ---- */

typedef struct epps_sweep_options {
  const int64_t* dts; /* NULL: the default grid */
  size_t n_dts;
  const epps_estimator* estimators; /* NULL: all */
  size_t n_estimators;
  double w_max;
  int textbook_pearson;
  epps_prior prior;
  epps_moments_mode moments;
  size_t min_points;
  size_t min_histogram;
  int has_window_begin;
  int64_t window_begin;
  int has_window_end;
  int64_t window_end;
} epps_sweep_options;

EPPS_API void epps_sweep_options_init(epps_sweep_options* opt);
EPPS_API epps_status epps_sweep(const epps_ticks* a, const epps_ticks* b,
                                const epps_sweep_options* opt, epps_curve** out);
/* out receives n_pairs curves. */
EPPS_API epps_status epps_sweep_many(const epps_ticks* const* a, const epps_ticks* const* b,
                                     size_t n_pairs, const epps_sweep_options* opt,
                                     epps_curve** out);

EPPS_API size_t epps_curve_rows(const epps_curve* c);
EPPS_API int64_t epps_curve_dt(const epps_curve* c, size_t row);
EPPS_API size_t epps_curve_cells(const epps_curve* c, size_t row);

typedef struct epps_cell_info {
  epps_estimator estimator;
  double value; /* NaN on failure */
  size_t n_samples;
  epps_status status; /* EPPS_OK, or the failure class */
  const char* error_kind; /* "" on success; valid while the curve lives */
  const char* message;
} epps_cell_info;

EPPS_API epps_status epps_curve_cell(const epps_curve* c, size_t row, size_t cell,
                                     epps_cell_info* out);

typedef struct epps_row_info {
  int64_t dt;
  double mean_frac_overlap;
  double sigma_raw[2];
  double sigma_hat[2];
} epps_row_info;

EPPS_API epps_status epps_curve_row(const epps_curve* c, size_t row, epps_row_info* out);
/* Writes NaN when the cell is missing or failed. */
EPPS_API epps_status epps_curve_value(const epps_curve* c, int64_t dt, epps_estimator e,
                                      double* out);
EPPS_API epps_status epps_curve_write(const epps_curve* c, const char* path);
EPPS_API epps_status epps_curve_read(const char* path, epps_curve** out);
EPPS_API void epps_curve_free(epps_curve* c);

/* ---- ensemble ---- */

EPPS_API epps_status epps_ensemble_build(const epps_curve* const* curves, size_t n,
                                         int64_t anchor_dt, epps_estimator anchor,
                                         epps_ensemble** out);
EPPS_API size_t epps_ensemble_rows(const epps_ensemble* e);

typedef struct epps_ensemble_row {
  int64_t dt;
  epps_estimator estimator;
  double mean_norm;
  double two_sigma;
  size_t n_pairs;
} epps_ensemble_row;

EPPS_API epps_status epps_ensemble_row_get(const epps_ensemble* e, size_t i,
                                           epps_ensemble_row* out);
EPPS_API size_t epps_ensemble_excluded(const epps_ensemble* e);
EPPS_API epps_status epps_ensemble_excluded_get(const epps_ensemble* e, size_t i,
                                                size_t* pair, const char** reason);
EPPS_API epps_status epps_ensemble_write(const epps_ensemble* e, const char* path);
EPPS_API void epps_ensemble_free(epps_ensemble* e);

/* ---- discretization moments ---- */

/* Histogram of previous-tick price changes at one dt over the full series. */
EPPS_API epps_status epps_moments_estimate(const epps_ticks* ticks, int64_t dt,
                                           epps_prior prior, size_t min_count,
                                           epps_moments** out);
EPPS_API size_t epps_moments_bins(const epps_moments* m);
/* k-th bin in ascending order; e1, e2 in currency units. */
EPPS_API epps_status epps_moments_bin(const epps_moments* m, size_t i, int64_t* k,
                                      double* e1, double* e2);
EPPS_API size_t epps_moments_fallback(const epps_moments* m);
EPPS_API epps_status epps_moments_write(const epps_moments* m, const char* path);
EPPS_API void epps_moments_free(epps_moments* m);

#ifdef __cplusplus
}
#endif

#endif
