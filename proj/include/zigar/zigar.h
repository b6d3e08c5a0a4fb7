/*
 * Copyright 2026 The zigar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef ZIGAR_ZIGAR_H
#define ZIGAR_ZIGAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(ZIGAR_BUILDING_SHARED)
#define ZIGAR_API __attribute__((visibility("default")))
#else
#define ZIGAR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zigar_status
{
    ZIGAR_OK = 0,
    ZIGAR_ERR_INVALID_INPUT = 1,
    ZIGAR_ERR_DEGENERATE_COLUMN = 2,
    ZIGAR_ERR_RANK_DEFICIENT = 3,
    ZIGAR_ERR_CONVERGENCE = 4,
    ZIGAR_ERR_SCHEMA = 5,
    ZIGAR_ERR_IO = 6,
    ZIGAR_ERR_CONFIG = 7,
    ZIGAR_ERR_INTERNAL = 8
} zigar_status;

/* Message of the last failed call on this thread; never NULL. */
ZIGAR_API const char* zigar_last_error(void);
ZIGAR_API const char* zigar_version(void);
ZIGAR_API const char* zigar_status_name(zigar_status status);

/* Optional progress sink; `user` is passed through unchanged. */
typedef void (*zigar_log_fn)(const char* message, void* user);

/* ---- workflows ------------------------------------------------------- */

ZIGAR_API zigar_status zigar_write_scenarios(const char* path);

typedef struct zigar_simulate_options
{
    const char* scenarios; /* "all", "7", "1,5", "1-10" */
    int reps;
    const char* methods; /* comma list; NULL for the default set */
    uint64_t seed;
    const char* out_dir;
    int grid_size;
    int cv_folds;
    int cv_repeats;
    int threads; /* 0: ZIGAR_THREADS or 1 */
    int paper_scale;
    int n_valid;
    int n_pilot;
    zigar_log_fn log;
    void* log_user;
} zigar_simulate_options;

ZIGAR_API void zigar_simulate_options_init(zigar_simulate_options* options);
/* `failures` receives the number of failed (replicate, method) fits. */
ZIGAR_API zigar_status zigar_simulate(const zigar_simulate_options* options,
                                      int* failures);

typedef struct zigar_fit_options
{
    const char* data_csv;
    const char* outcome;
    const char* covariates; /* comma list or NULL */
    const char* id_column;  /* NULL when absent */
    const char* methods;    /* comma list */
    double max_pmv;
    int grid_size;
    int cv_folds;
    int cv_repeats;
    int outer_folds; /* 0 disables the cross-validated evaluation */
    uint64_t seed;
    const char* out_dir;
    int threads;
    zigar_log_fn log;
    void* log_user;
} zigar_fit_options;

ZIGAR_API void zigar_fit_options_init(zigar_fit_options* options);
ZIGAR_API zigar_status zigar_fit_csv(const zigar_fit_options* options);

typedef enum zigar_strategy
{
    ZIGAR_STRATEGY_COMPONENTS = 0,
    ZIGAR_STRATEGY_IMPUTE = 1
} zigar_strategy;

typedef struct zigar_transform_options
{
    const char* data_csv;
    zigar_strategy strategy;
    const char* out_dir;
    const char* id_column;    /* NULL when absent */
    const char* drop_columns; /* comma list or NULL */
    const char* stats_json;   /* re-apply saved statistics; NULL to fit */
    double max_pmv;
    int standardize;
    int log2; /* 1: log2, 0: natural log */
    zigar_log_fn log;
    void* log_user;
} zigar_transform_options;

ZIGAR_API void zigar_transform_options_init(zigar_transform_options* options);
ZIGAR_API zigar_status zigar_transform_csv(const zigar_transform_options* options);

/* ---- in-memory models ------------------------------------------------ */

/* Column-major n x q intensities (zeros are PMVs). */
typedef struct zigar_intensity zigar_intensity;
typedef struct zigar_model zigar_model;

/* `column_ids` may be NULL for p1..pq. */
ZIGAR_API zigar_status zigar_intensity_create(const double* values, size_t n,
                                              size_t q, const char* const* column_ids,
                                              zigar_intensity** out);
ZIGAR_API void zigar_intensity_free(zigar_intensity* z);

typedef struct zigar_model_options
{
    const char* method;
    int grid_size;
    int cv_folds;
    int cv_repeats;
    uint64_t seed;
    int log2; /* 1: log2 transform (default), 0: natural log */
    int threads;
} zigar_model_options;

ZIGAR_API void zigar_model_options_init(zigar_model_options* options);

/* Tunes by repeated CV and fits on all rows. */
ZIGAR_API zigar_status zigar_model_fit(const zigar_intensity* z, const double* y,
                                       const zigar_model_options* options,
                                       zigar_model** out);
/* Fits at fixed penalties; lambda2 is ignored by one-stage methods. */
ZIGAR_API zigar_status zigar_model_fit_fixed(const zigar_intensity* z, const double* y,
                                             const char* method, double lambda1,
                                             double lambda2, int log2,
                                             zigar_model** out);
ZIGAR_API void zigar_model_free(zigar_model* model);

/* `yhat` must hold one value per row of `z`. */
ZIGAR_API zigar_status zigar_model_predict(const zigar_model* model,
                                           const zigar_intensity* z, double* yhat);
ZIGAR_API zigar_status zigar_model_intercept(const zigar_model* model, double* out);
ZIGAR_API zigar_status zigar_model_penalties(const zigar_model* model, double* lambda1,
                                             double* lambda2);
/* Number of selected predictors; ids are retrieved one at a time. */
ZIGAR_API zigar_status zigar_model_selected_count(const zigar_model* model, size_t* count);
ZIGAR_API const char* zigar_model_selected_id(const zigar_model* model, size_t index);
/* Coefficient table in the CSV layout used by `zigar fit`. The string is
   owned by the model. */
ZIGAR_API const char* zigar_model_coefficients_csv(const zigar_model* model);

#ifdef __cplusplus
}
#endif

#endif
