/*
 * Copyright 2026 The robscale Authors
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

/*
 * C interface to librobscale: outlier-score to outlier-probability
 * transformations, their evaluation, and method ranking.
 *
 * Conventions
 *   - Every fallible call returns rs_status; RS_OK is 0. On failure the
 *     message is available from rs_last_error() on the same thread until the
 *     next failing call on that thread.
 *   - Handles are opaque and owned by the caller; free them with the matching
 *     rs_*_free function (NULL is accepted).
 *   - Strings returned by the library stay valid for the lifetime of the
 *     handle they came from (static for rs_version/rs_registry_name).
 *   - Handles are immutable after creation, except rs_dataset_normalize, and
 *     may be read from several threads at once.
 */
#ifndef ROBSCALE_H
#define ROBSCALE_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(ROBSCALE_BUILDING)
#    define RS_API __declspec(dllexport)
#  else
#    define RS_API __declspec(dllimport)
#  endif
#else
#  define RS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
    RS_OK = 0,
    RS_ERR_INVALID_ARGUMENT = 1, /* bad parameters or data */
    RS_ERR_PARSE = 2,            /* malformed input file */
    RS_ERR_IO = 3,               /* file could not be read or written */
    RS_ERR_NUMERIC = 4,          /* an estimator failed on valid data */
    RS_ERR_INTERNAL = 5
} rs_status;

typedef enum rs_alternative {
    RS_TWO_SIDED = 0,
    RS_GREATER = 1,
    RS_LESS = 2
} rs_alternative;

typedef struct rs_dataset rs_dataset;
typedef struct rs_scores rs_scores;
typedef struct rs_report rs_report;
typedef struct rs_comparison rs_comparison;

typedef struct rs_transform_options {
    double trim_fraction; /* asymmetric trimming for trim/tsd estimators */
    double huber_tuning;
    double tukey_tuning;
    double tol;
    int max_iter;
} rs_transform_options;

RS_API const char* rs_version(void);
RS_API const char* rs_last_error(void);
RS_API const char* rs_status_string(rs_status status);

RS_API void rs_transform_options_default(rs_transform_options* options);

RS_API rs_status rs_erf(double x, double* out);

/* ---- datasets and the kNN detector ---------------------------------- */

/* label_col may be NULL or "" for unlabelled data. */
RS_API rs_status rs_dataset_read(const char* path, const char* label_col, rs_dataset** out);
RS_API rs_status rs_dataset_normalize(rs_dataset* dataset);
RS_API size_t rs_dataset_rows(const rs_dataset* dataset);
RS_API size_t rs_dataset_cols(const rs_dataset* dataset);
RS_API int rs_dataset_has_labels(const rs_dataset* dataset);
RS_API void rs_dataset_free(rs_dataset* dataset);

RS_API rs_status rs_knn_scores(const rs_dataset* dataset, size_t k, rs_scores** out);

/* ---- score sets ------------------------------------------------------ */

/* labels may be NULL; otherwise n entries of 0/1. Ids are "1".."n". */
RS_API rs_status rs_scores_create(const double* values, const int* labels, size_t n, rs_scores** out);
RS_API rs_status rs_scores_read(const char* path, rs_scores** out);
RS_API rs_status rs_scores_write(const rs_scores* scores, const char* path);
RS_API size_t rs_scores_size(const rs_scores* scores);
RS_API const double* rs_scores_values(const rs_scores* scores);
RS_API int rs_scores_has_labels(const rs_scores* scores);
/* Copies size() labels into out. */
RS_API rs_status rs_scores_labels(const rs_scores* scores, int* out);
RS_API void rs_scores_free(rs_scores* scores);

/* ---- transformations ------------------------------------------------- */

RS_API size_t rs_registry_size(void);
RS_API const char* rs_registry_name(size_t index);

/* options may be NULL for defaults. converged may be NULL. */
RS_API rs_status rs_fit(const rs_scores* scores, const char* method, const rs_transform_options* options,
                        double* center, double* scale, int* converged);
/* Writes size() probabilities into out. */
RS_API rs_status rs_apply(const rs_scores* scores, const char* method, const rs_transform_options* options,
                          double* out);
/* One probability file per method in out_dir ("all" expands to the registry). */
RS_API rs_status rs_transform_to_dir(const char* scores_path, const char* const* methods, size_t n_methods,
                                     const rs_transform_options* options, const char* out_dir,
                                     size_t* files_written);

/* ---- evaluation ------------------------------------------------------ */

/* probs[i] holds size() probabilities for methods[i]. reference may be NULL. */
RS_API rs_status rs_evaluate(const rs_scores* labelled, const char* const* methods, const double* const* probs,
                             size_t n_methods, int min_bins, int max_bins, const char* reference,
                             rs_report** out);
RS_API rs_status rs_evaluate_dir(const char* probs_dir, const char* labels_path, int min_bins, int max_bins,
                                 const char* reference, rs_report** out);
RS_API rs_status rs_report_read(const char* path, rs_report** out);
RS_API rs_status rs_report_write(const rs_report* report, const char* path);
RS_API size_t rs_report_size(const rs_report* report);
/* skill is NaN when the row has none. Any out pointer may be NULL. */
RS_API rs_status rs_report_row(const rs_report* report, size_t index, const char** transform,
                               const char** measure, const char** stratum, double* value, double* skill);
RS_API rs_status rs_report_value(const rs_report* report, const char* transform, const char* measure,
                                 const char* stratum, double* value, double* skill);
RS_API void rs_report_free(rs_report* report);

RS_API double rs_skill_score(double m, double m_ref);

/* ---- ranking --------------------------------------------------------- */

/* stratum may be NULL for the measure's default (stratified for his, else all). */
RS_API rs_status rs_compare(const rs_report* const* reports, size_t n_reports, const char* measure,
                            const char* stratum, double alpha, rs_alternative alternative, rs_comparison** out);
RS_API size_t rs_comparison_size(const rs_comparison* cmp);
/* Methods in rank order, best first. */
RS_API const char* rs_comparison_method(const rs_comparison* cmp, size_t rank_position);
RS_API double rs_comparison_mean_rank(const rs_comparison* cmp, size_t rank_position);
RS_API size_t rs_comparison_group_count(const rs_comparison* cmp);
/* Members are rank positions (indices usable with rs_comparison_method). */
RS_API rs_status rs_comparison_group(const rs_comparison* cmp, size_t group, const size_t** members,
                                     size_t* n_members);
RS_API rs_status rs_comparison_write(const rs_comparison* cmp, const char* path);
RS_API void rs_comparison_free(rs_comparison* cmp);

RS_API rs_status rs_wilcoxon(const double* x, const double* y, size_t n, rs_alternative alternative,
                             double* p_value, int* degenerate);

/* ---- case study ------------------------------------------------------ */

/* Writes the plot-data files and manifest; mean residuals may be NULL. */
RS_API rs_status rs_figure1(const char* data_path, const char* label_col, size_t k, int minmax,
                            const char* out_dir, double* reference_outlier_residual,
                            double* reference_inlier_residual, double* robust_outlier_residual,
                            double* robust_inlier_residual);

#ifdef __cplusplus
}
#endif

#endif /* ROBSCALE_H */
