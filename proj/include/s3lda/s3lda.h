#ifndef S3LDA_H
#define S3LDA_H

/* C interface to the semi-supervised sparse LDA library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions that can fail return an s3lda_status; on failure a
 * human-readable message for the calling thread is available from
 * s3lda_last_error(). Handles returned through out-parameters are only
 * valid when the call returned S3LDA_OK.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define S3LDA_API __declspec(dllexport)
#else
#define S3LDA_API __attribute__((visibility("default")))
#endif

typedef enum s3lda_status {
    S3LDA_OK = 0,
    S3LDA_ERR_IO = 1,      /* file missing or unreadable/unwritable */
    S3LDA_ERR_PARSE = 2,   /* malformed file contents */
    S3LDA_ERR_INVALID = 3, /* invalid argument or inconsistent data */
    S3LDA_ERR_SOLVER = 4   /* optimization failure */
} s3lda_status;

typedef struct s3lda_dataset s3lda_dataset;
typedef struct s3lda_model s3lda_model;
typedef struct s3lda_config s3lda_config;

/* Message for the most recent failure on this thread; never NULL. */
S3LDA_API const char* s3lda_last_error(void);

/* ---- datasets -----------------------------------------------------------
 * Text format: header "d=<int>", then one observation per line,
 * "<+1|-1|?> v1 v2 ... vd" with '?' marking an unlabeled row.
 */
S3LDA_API s3lda_status s3lda_dataset_read(const char* path, s3lda_dataset** out);
S3LDA_API s3lda_status s3lda_dataset_write(const s3lda_dataset* ds, const char* path);
S3LDA_API void s3lda_dataset_free(s3lda_dataset* ds);
S3LDA_API int s3lda_dataset_dim(const s3lda_dataset* ds);
S3LDA_API int s3lda_dataset_n_labeled(const s3lda_dataset* ds);
S3LDA_API int s3lda_dataset_n_unlabeled(const s3lda_dataset* ds);

/* ---- linear models ------------------------------------------------------
 * Text format: line 1 "b=<float>", then "omega[<j>]=<float>" for nonzero
 * coefficients only (0-based), floats with 17 significant digits so a
 * write/read round trip is exact. dim = 0 infers the dimension from the
 * largest index present in the file.
 */
S3LDA_API s3lda_status s3lda_model_read(const char* path, int dim, s3lda_model** out);
S3LDA_API s3lda_status s3lda_model_write(const s3lda_model* m, const char* path);
S3LDA_API void s3lda_model_free(s3lda_model* m);
S3LDA_API int s3lda_model_dim(const s3lda_model* m);
S3LDA_API double s3lda_model_intercept(const s3lda_model* m);
S3LDA_API int s3lda_model_nnz(const s3lda_model* m);
S3LDA_API s3lda_status s3lda_model_coefficients(const s3lda_model* m, double* out, size_t len);
S3LDA_API s3lda_status s3lda_model_decision(const s3lda_model* m, const double* x, size_t len,
                                            double* out);
/* label_out receives +1 or -1; a decision value of exactly 0 maps to +1 */
S3LDA_API s3lda_status s3lda_model_predict(const s3lda_model* m, const double* x, size_t len,
                                           int* label_out);

/* ---- configuration ------------------------------------------------------
 * Sectioned key=value text file; unknown sections or keys are rejected.
 */
S3LDA_API s3lda_status s3lda_config_read(const char* path, s3lda_config** out);
S3LDA_API void s3lda_config_free(s3lda_config* cfg);
S3LDA_API void s3lda_config_set_seed(s3lda_config* cfg, uint64_t seed);
/* threads = 0 selects hardware concurrency */
S3LDA_API s3lda_status s3lda_config_set_threads(s3lda_config* cfg, int threads);
S3LDA_API s3lda_status s3lda_config_set_output_dir(s3lda_config* cfg, const char* dir);

/* ---- operations --------------------------------------------------------- */

/* Writes <out_dir>/train.txt, tune.txt and test.txt for the configured
 * simulated example. */
S3LDA_API s3lda_status s3lda_simulate(const s3lda_config* cfg, const char* out_dir);

/* Standardizes, grid-searches (C1, C2), and returns the selected model
 * rewritten to act on raw covariates. When tune_report_csv is non-NULL the
 * per-cell tuning report is written there. */
S3LDA_API s3lda_status s3lda_fit(const s3lda_config* cfg, const s3lda_dataset* train,
                                 const s3lda_dataset* tune, s3lda_model** model_out,
                                 const char* tune_report_csv);

/* Runs the replication study and writes <out_dir>/results.csv and
 * <out_dir>/summary.csv. Outputs are a pure function of (config, seed);
 * thread count never changes them. When summary_text_out is non-NULL it
 * receives a printable summary table (release with s3lda_string_free).
 * Returns S3LDA_ERR_SOLVER only when every method failed. */
S3LDA_API s3lda_status s3lda_experiment(const s3lda_config* cfg, const char* out_dir,
                                        char** summary_text_out);

/* Runs the numerical verification suite for the population-level results.
 * all_pass_out receives 1 when every check passes. table_out, when
 * non-NULL, receives the printable pass/fail table. */
S3LDA_API s3lda_status s3lda_theory(const s3lda_config* cfg, char** table_out, int* all_pass_out);

S3LDA_API void s3lda_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* S3LDA_H */
