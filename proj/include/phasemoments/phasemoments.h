#ifndef PHASEMOMENTS_H
#define PHASEMOMENTS_H

#include <stddef.h>
#include <stdint.h>

#if defined(PM_BUILDING_LIBRARY)
#define PM_API __attribute__((visibility("default")))
#else
#define PM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every function returns a status; on failure pm_last_error() holds a
   message for the calling thread. */
typedef enum pm_status {
  PM_OK = 0,
  PM_ERR_INVALID_ARGUMENT = 1,
  PM_ERR_DOMAIN = 2,
  PM_ERR_CONVERGENCE = 3,
  PM_ERR_TRUNCATION = 4,
  PM_ERR_PARSE = 5,
  PM_ERR_SCHEMA = 6,
  PM_ERR_IO = 7,
  PM_ERR_CONFIGURATION = 8,
  PM_ERR_VERIFICATION = 9,
  PM_ERR_INTERNAL = 10
} pm_status;

typedef struct pm_config pm_config;
typedef struct pm_kernel_table pm_kernel_table;
typedef struct pm_state pm_state;
typedef struct pm_records pm_records;
typedef struct pm_moments pm_moments;
typedef struct pm_distribution pm_distribution;

PM_API const char* pm_last_error(void);
PM_API const char* pm_status_name(pm_status status);
PM_API const char* pm_version(void);

/* Strings are copied into caller buffers. *needed (if not NULL) receives the
   size including the terminator; a short buffer gives
   PM_ERR_INVALID_ARGUMENT and leaves buf untouched. */

/* Run configuration */
PM_API pm_status pm_config_create(pm_config** out);
PM_API pm_status pm_config_parse(const char* text, pm_config** out);
PM_API pm_status pm_config_load(const char* path, pm_config** out);
PM_API pm_status pm_config_set(pm_config* cfg, const char* key, const char* value);
PM_API pm_status pm_config_get(const pm_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
PM_API pm_status pm_config_to_text(const pm_config* cfg, char* buf, size_t cap, size_t* needed);
PM_API pm_status pm_config_hash(const pm_config* cfg, uint64_t* out);
PM_API pm_status pm_config_validate(const pm_config* cfg);
/* Applies the PHASEMOMENTS_OUTPUT_DIR override. */
PM_API pm_status pm_config_apply_environment(pm_config* cfg);
PM_API void pm_config_destroy(pm_config* cfg);

/* Kernels */
typedef struct pm_kernel_spec {
  int k;
  double eta;
  int l0;
  double x0;
  int f_truncation;
  int matched_tail;
} pm_kernel_spec;

PM_API void pm_kernel_spec_default(pm_kernel_spec* spec);
PM_API pm_status pm_kernel_eval(const pm_kernel_spec* spec, double x, double* out);
PM_API pm_status pm_classical_kernel(int k, double x, double* out);
PM_API pm_status pm_kernel_table_build(const pm_kernel_spec* spec, double grid_step, pm_kernel_table** out);
/* provenance may be NULL; otherwise its hash goes into the file header. */
PM_API pm_status pm_kernel_table_save(const pm_kernel_table* t, const char* path, const pm_config* provenance);
PM_API pm_status pm_kernel_table_load(const char* path, pm_kernel_table** out);
PM_API pm_status pm_kernel_table_eval(const pm_kernel_table* t, double x, double* out);
PM_API pm_status pm_kernel_table_spec(const pm_kernel_table* t, pm_kernel_spec* out);
PM_API void pm_kernel_table_destroy(pm_kernel_table* t);

/* States built from the state.* keys of a config */
PM_API pm_status pm_state_build(const pm_config* cfg, pm_state** out);
PM_API pm_status pm_state_mean_photon_number(const pm_state* s, double* out);
PM_API pm_status pm_state_exact_moment(const pm_state* s, int k, double* re, double* im);
PM_API pm_status pm_state_phase_density(const pm_state* s, double phi, double* out);
PM_API pm_status pm_state_quadrature_density(const pm_state* s, double x, double theta, double* out);
PM_API void pm_state_destroy(pm_state* s);

/* Measurement records */
PM_API pm_status pm_simulate(const pm_config* cfg, pm_records** out);
PM_API pm_status pm_records_save(const pm_records* r, const char* path, const pm_config* provenance);
PM_API pm_status pm_records_load(const char* path, pm_records** out);
PM_API pm_status pm_records_n_phases(const pm_records* r, int* out);
PM_API pm_status pm_records_count(const pm_records* r, int phase, int* out);
/* Copies the records of one phase; cap is in doubles. */
PM_API pm_status pm_records_get(const pm_records* r, int phase, double* buf, size_t cap);
PM_API void pm_records_destroy(pm_records* r);

/* Moment estimates */
typedef struct pm_moment {
  int k;
  double re;
  double im;
  double sigma_re;
  double sigma_im;
  int compensated;
  double eta;
  int n_phases;
} pm_moment;

/* Kernel settings, k_max and compensation come from cfg; the efficiency
   from the records. */
PM_API pm_status pm_estimate(const pm_config* cfg, const pm_records* r, pm_moments** out);
PM_API pm_status pm_moments_save(const pm_moments* m, const char* path, const pm_config* provenance);
PM_API pm_status pm_moments_load(const char* path, pm_moments** out);
PM_API pm_status pm_moments_count(const pm_moments* m, int* out);
PM_API pm_status pm_moments_get(const pm_moments* m, int index, pm_moment* out);
PM_API void pm_moments_destroy(pm_moments* m);

/* Phase distribution */
PM_API pm_status pm_reconstruct(const pm_config* cfg, const pm_moments* m, pm_distribution** out);
PM_API pm_status pm_distribution_save(const pm_distribution* d, const char* path, const pm_config* provenance);
PM_API pm_status pm_distribution_load(const char* path, pm_distribution** out);
PM_API pm_status pm_distribution_size(const pm_distribution* d, int* out);
PM_API pm_status pm_distribution_get(const pm_distribution* d, int index, double* phi, double* value);
PM_API void pm_distribution_destroy(pm_distribution* d);

/* Whole run into cfg's output_dir; cb (may be NULL) receives each artifact
   kind ("records", "moments", "distribution") and path. */
typedef void (*pm_artifact_callback)(const char* kind, const char* path, void* user);
PM_API pm_status pm_pipeline(const pm_config* cfg, pm_artifact_callback cb, void* user);

/* Path of a named artifact inside cfg's output_dir. */
PM_API pm_status pm_artifact_path(const pm_config* cfg, const char* name, char* buf, size_t cap, size_t* needed);

/* Identity suites */
typedef struct pm_identity_check {
  const char* suite; /* "quantum" or "classical" */
  int k;
  double param; /* n or r */
  double residual;
  double tolerance;
  int passed;
} pm_identity_check;

typedef void (*pm_check_callback)(const pm_identity_check* check, void* user);
/* base may be NULL for default kernel settings. Returns PM_ERR_VERIFICATION
   when any check fails; *failed (if not NULL) gets the count. */
PM_API pm_status pm_verify(const pm_kernel_spec* base, double grid_step, pm_check_callback cb, void* user,
                           int* failed);

#ifdef __cplusplus
}
#endif

#endif
