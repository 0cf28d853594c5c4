/* SPDX-License-Identifier: Apache-2.0 */
/* Copyright Contributors to the reswd project. */

/*
 * C interface to the reswd library.
 *
 * Objects are opaque handles created by *_create / *_load style calls and
 * released with the matching *_destroy. Every fallible call returns a
 * reswd_status; on failure reswd_last_error() describes the problem. The
 * message is per-thread and valid until the next failing call on that thread.
 */
#ifndef RESWD_RESWD_H
#define RESWD_RESWD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RESWD_API __declspec(dllexport)
#else
#define RESWD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum reswd_status {
    RESWD_OK = 0,
    RESWD_ERR_INVALID_ARGUMENT = 1,
    RESWD_ERR_CONFIG = 2,
    RESWD_ERR_INPUT = 3,
    RESWD_ERR_OUTPUT = 4,
    RESWD_ERR_NUMERIC = 5,
    RESWD_ERR_INTERNAL = 6
} reswd_status;

RESWD_API const char *reswd_last_error(void);
RESWD_API const char *reswd_status_name(reswd_status status);
RESWD_API const char *reswd_version(void);

/* ---- configuration ---------------------------------------------------- */

typedef enum reswd_method { RESWD_METHOD_SWD = 0, RESWD_METHOD_RESWD = 1 } reswd_method;

typedef struct reswd_config {
    int total_projections; /* L, default 64 */
    int fresh_count;       /* M, default 8; reservoir capacity is L - M */
    double p;              /* cost exponent, default 2 */
    double alpha;          /* ESS flush threshold, default 0.5 */
    double tau;            /* decay time constant, 0 disables; default 0 */
    uint64_t seed;
} reswd_config;

RESWD_API void reswd_config_default(reswd_config *cfg);
RESWD_API reswd_status reswd_config_validate(const reswd_config *cfg);

typedef enum reswd_optimizer_kind { RESWD_OPT_ADAM = 0, RESWD_OPT_SGD = 1 } reswd_optimizer_kind;

typedef struct reswd_optimizer {
    reswd_optimizer_kind kind;
    double lr;
    double beta1;
    double beta2;
    double eps;
} reswd_optimizer;

RESWD_API void reswd_optimizer_default(reswd_optimizer *opt);

/* ---- sample sets ------------------------------------------------------ */

typedef struct reswd_samples reswd_samples;

/* Copies n * dim row-major values. */
RESWD_API reswd_status reswd_samples_create(size_t n, size_t dim, const double *data,
                                            reswd_samples **out);
/* Point file: one point per line, whitespace/comma separated, '#' comments. */
RESWD_API reswd_status reswd_samples_load(const char *path, reswd_samples **out);
RESWD_API reswd_status reswd_samples_save(const reswd_samples *s, const char *path);
RESWD_API void reswd_samples_destroy(reswd_samples *s);
RESWD_API size_t reswd_samples_count(const reswd_samples *s);
RESWD_API size_t reswd_samples_dim(const reswd_samples *s);
RESWD_API const double *reswd_samples_data(const reswd_samples *s);

/* Per-axis exact W1 averaged over axes. */
RESWD_API reswd_status reswd_marginal_w1(const reswd_samples *x, const reswd_samples *y,
                                         double *out);

/* ---- estimators ------------------------------------------------------- */

typedef struct reswd_step_result {
    double value;
    double ess;
    int flushed;
    int degenerate;
    size_t reservoir_size; /* entries carried into the next step */
} reswd_step_result;

/* Plain Monte Carlo estimate over `projections` directions. grad may be NULL,
 * otherwise it receives n(x) * dim values. */
RESWD_API reswd_status reswd_swd(const reswd_samples *x, const reswd_samples *y, int projections,
                                 double p, uint64_t seed, double *value, double *grad);

typedef struct reswd_estimator reswd_estimator;

RESWD_API reswd_status reswd_estimator_create(const reswd_config *cfg, reswd_estimator **out);
RESWD_API void reswd_estimator_destroy(reswd_estimator *est);
/* One reservoir step; grad as for reswd_swd. */
RESWD_API reswd_status reswd_estimator_step(reswd_estimator *est, const reswd_samples *x,
                                            const reswd_samples *y, reswd_step_result *result,
                                            double *grad);
RESWD_API int64_t reswd_estimator_steps_taken(const reswd_estimator *est);
RESWD_API reswd_status reswd_estimator_save_reservoir(const reswd_estimator *est, const char *path);
RESWD_API reswd_status reswd_estimator_load_reservoir(reswd_estimator *est, const char *path);

/* ---- optimisation reports --------------------------------------------- */

typedef struct reswd_report reswd_report;

typedef struct reswd_step_record {
    int64_t step;
    double loss;
    double mean_w1;
    double wall_ms;
} reswd_step_record;

RESWD_API void reswd_report_destroy(reswd_report *r);
RESWD_API size_t reswd_report_step_count(const reswd_report *r);
RESWD_API reswd_status reswd_report_step(const reswd_report *r, size_t i, reswd_step_record *out);
RESWD_API double reswd_report_final_mean_w1(const reswd_report *r);
/* NULL for reports without particles (color matching). Owned by the report. */
RESWD_API const reswd_samples *reswd_report_final_samples(const reswd_report *r);
RESWD_API size_t reswd_report_warning_count(const reswd_report *r);
RESWD_API const char *reswd_report_warning(const reswd_report *r, size_t i);
/* step,loss,mean_w1,wall_ms; timing == 0 writes wall_ms as 0. */
RESWD_API reswd_status reswd_report_write_csv(const reswd_report *r, const char *path, int timing);

/* Moves the particles x0 toward y for `steps` optimizer steps. */
RESWD_API reswd_status reswd_match(const reswd_samples *x0, const reswd_samples *y,
                                   const reswd_config *cfg, int steps, const reswd_optimizer *opt,
                                   reswd_method method, reswd_report **out);

/* ---- benchmark -------------------------------------------------------- */

typedef struct reswd_bench_config {
    int pairs;          /* default 1000 */
    int samples;        /* default 1024 */
    int dim;            /* default 3 */
    int steps;          /* default 300 */
    int seeds_per_pair; /* default 1 */
    reswd_config estimator;
    reswd_optimizer optimizer;
    uint64_t seed;
    int jobs; /* worker threads; 0 means one per logical core (default) */
    /* Extra ReSWD runs named "reswd_m<M>", one per value; may be NULL. */
    const int *ablation_fresh;
    size_t ablation_count;
} reswd_bench_config;

typedef struct reswd_bench reswd_bench;

RESWD_API void reswd_bench_config_default(reswd_bench_config *cfg);
RESWD_API reswd_status reswd_bench_run(const reswd_bench_config *cfg, reswd_bench **out);
RESWD_API void reswd_bench_destroy(reswd_bench *b);
RESWD_API size_t reswd_bench_method_count(const reswd_bench *b);
RESWD_API const char *reswd_bench_method_name(const reswd_bench *b, size_t method);
RESWD_API reswd_status reswd_bench_method_summary(const reswd_bench *b, size_t method,
                                                  double *final_mean_w1, double *ms_per_step,
                                                  size_t *runs);
/* pearson is NaN when fewer than 30 runs succeeded. step is 0-based. */
RESWD_API reswd_status reswd_bench_series(const reswd_bench *b, size_t method, size_t step,
                                          double *mean_w1, double *pearson, double *wall_ms);
RESWD_API size_t reswd_bench_warning_count(const reswd_bench *b);
RESWD_API const char *reswd_bench_warning(const reswd_bench *b, size_t i);
/* JSON text owned by the handle; timing == 0 reports ms_per_step as 0. */
RESWD_API const char *reswd_bench_summary_json(const reswd_bench *b, int timing);
/* Writes <method>.csv per method and summary.json into an existing directory. */
RESWD_API reswd_status reswd_bench_write(const reswd_bench *b, const char *dir, int timing);

/* ---- color ------------------------------------------------------------ */

typedef struct reswd_image reswd_image;

typedef struct reswd_cdl {
    double slope[3];
    double offset[3];
    double power[3];
    double saturation;
} reswd_cdl;

/* Copies width * height * 3 interleaved sRGB values in [0, 1]. */
RESWD_API reswd_status reswd_image_create(int width, int height, const double *rgb,
                                          reswd_image **out);
RESWD_API reswd_status reswd_image_load_png(const char *path, reswd_image **out);
/* bit_depth is 8 or 16; values are clamped to [0, 1]. */
RESWD_API reswd_status reswd_image_save_png(const reswd_image *img, const char *path,
                                            int bit_depth);
RESWD_API void reswd_image_destroy(reswd_image *img);
RESWD_API int reswd_image_width(const reswd_image *img);
RESWD_API int reswd_image_height(const reswd_image *img);
RESWD_API const double *reswd_image_data(const reswd_image *img);
RESWD_API reswd_status reswd_image_psnr(const reswd_image *a, const reswd_image *b, double *out);

RESWD_API void reswd_cdl_identity(reswd_cdl *cdl);
RESWD_API reswd_status reswd_cdl_apply(const reswd_image *img, const reswd_cdl *cdl,
                                       reswd_image **out);
RESWD_API reswd_status reswd_cdl_write_xml(const reswd_cdl *cdl, const char *path);
RESWD_API reswd_status reswd_cdl_read_xml(const char *path, reswd_cdl *out);

/* Fits a CDL grading `source` toward `reference` (both downscaled to 128 px).
 * report may be NULL. */
RESWD_API reswd_status reswd_color_match(const reswd_image *source, const reswd_image *reference,
                                         const reswd_config *cfg, int steps, reswd_cdl *out,
                                         reswd_report **report);

#ifdef __cplusplus
}
#endif

#endif /* RESWD_RESWD_H */
