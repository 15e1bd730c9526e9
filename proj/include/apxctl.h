#ifndef APXCTL_H
#define APXCTL_H

/* C interface to the apxctl library: spectral bases, impulsive delay
 * integration, terminal-window Gramians and regularized steering.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Every function returns an apxctl_status; on failure a message is
 * available from apxctl_last_error() on the calling thread. */

#include <stddef.h>

#if defined(APXCTL_BUILDING_LIBRARY)
#define APXCTL_API __attribute__((visibility("default")))
#else
#define APXCTL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum apxctl_status {
  APXCTL_OK = 0,
  APXCTL_ERR_VALIDATION = 1,
  APXCTL_ERR_NUMERICAL = 2,
  APXCTL_ERR_CHECK_FAILED = 3,
  APXCTL_ERR_ARGUMENT = 4,
  APXCTL_ERR_IO = 5,
  APXCTL_ERR_INTERNAL = 6
} apxctl_status;

typedef struct apxctl_config apxctl_config;
typedef struct apxctl_report apxctl_report;
typedef struct apxctl_basis apxctl_basis;
typedef struct apxctl_gramian apxctl_gramian;

APXCTL_API const char* apxctl_version(void);
/* Message of the last failed call on this thread, "" if none. */
APXCTL_API const char* apxctl_last_error(void);

/* ---- configuration ---- */
APXCTL_API apxctl_status apxctl_config_load(const char* path, apxctl_config** out);
APXCTL_API apxctl_status apxctl_config_parse(const char* text, apxctl_config** out);
/* Replace the alpha or delta ladder with a single value. */
APXCTL_API apxctl_status apxctl_config_override_alpha(apxctl_config* cfg, double alpha);
APXCTL_API apxctl_status apxctl_config_override_delta(apxctl_config* cfg, double delta);
APXCTL_API apxctl_status apxctl_config_set_output_dir(apxctl_config* cfg, const char* dir);
/* Canonical JSON; the string lives until the next call on the same handle. */
APXCTL_API apxctl_status apxctl_config_emit(apxctl_config* cfg, const char** text);
APXCTL_API apxctl_status apxctl_config_hash(const apxctl_config* cfg, unsigned long long* hash);
APXCTL_API void apxctl_config_free(apxctl_config* cfg);

/* ---- verbs ----
 * verb: simulate | steer | sweep | gramian | check. out_dir may be NULL to
 * keep the configured directory. A check failure returns
 * APXCTL_ERR_CHECK_FAILED and still fills *report. */
APXCTL_API apxctl_status apxctl_run(const apxctl_config* cfg, const char* verb, const char* out_dir,
                                    unsigned jobs, apxctl_report** report);
APXCTL_API const char* apxctl_report_text(const apxctl_report* report);
APXCTL_API int apxctl_report_warning(const apxctl_report* report);
APXCTL_API size_t apxctl_report_file_count(const apxctl_report* report);
APXCTL_API const char* apxctl_report_file(const apxctl_report* report, size_t index);
APXCTL_API void apxctl_report_free(apxctl_report* report);

/* ---- spectral basis ----
 * preset: "heat-1d" or "heat-2d". */
APXCTL_API apxctl_status apxctl_basis_create(const char* preset, size_t modes, apxctl_basis** out);
APXCTL_API size_t apxctl_basis_size(const apxctl_basis* basis);
/* Copies min(capacity, size) eigenvalues. */
APXCTL_API apxctl_status apxctl_basis_eigenvalues(const apxctl_basis* basis, double* out, size_t capacity);
/* out = T(t) z; both arrays hold size() coefficients and may alias. */
APXCTL_API apxctl_status apxctl_basis_semigroup_apply(const apxctl_basis* basis, double t, const double* z,
                                                      double* out);
APXCTL_API apxctl_status apxctl_basis_beta_norm(const apxctl_basis* basis, double beta, const double* z,
                                                double* out);
APXCTL_API void apxctl_basis_free(apxctl_basis* basis);

/* ---- Gramian ----
 * b: row-major state_dim x control_dim matrix with state_dim = basis size,
 * or NULL for B = I. */
APXCTL_API apxctl_status apxctl_gramian_assemble(const apxctl_basis* basis, const double* b, size_t control_dim,
                                                 double horizon, double delta, apxctl_gramian** out);
APXCTL_API size_t apxctl_gramian_size(const apxctl_gramian* q);
APXCTL_API apxctl_status apxctl_gramian_eigen_range(const apxctl_gramian* q, double* min_eigenvalue,
                                                    double* max_eigenvalue);
/* Row-major m x m entries. */
APXCTL_API apxctl_status apxctl_gramian_entries(const apxctl_gramian* q, double* out);
/* y = (alpha I + Q)^{-1} w. */
APXCTL_API apxctl_status apxctl_gramian_regularized_solve(const apxctl_gramian* q, double alpha, const double* w,
                                                          double* y);
APXCTL_API void apxctl_gramian_free(apxctl_gramian* q);

/* Eigenspace rank test for the same B layout as apxctl_gramian_assemble. */
APXCTL_API apxctl_status apxctl_check_h1(const apxctl_basis* basis, const double* b, size_t control_dim,
                                         int* holds, size_t* rank);

#ifdef __cplusplus
}
#endif

#endif
