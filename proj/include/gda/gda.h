/* gda — generalized discrepancy adaptation library, public C interface.
 *
 * All functions return gda_status (GDA_OK on success); gda_last_error()
 * carries a thread-local message for the most recent failure. Objects are
 * opaque handles released with their _free function. Strings returned
 * through char** are heap-allocated; release them with gda_string_free.
 */
#ifndef GDA_GDA_H
#define GDA_GDA_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct gda_dataset gda_dataset;
typedef struct gda_model gda_model;

typedef enum gda_status {
  GDA_OK = 0,
  GDA_ERR_INVALID_ARG = 1,
  GDA_ERR_IO = 2,
  GDA_ERR_PARSE = 3,
  GDA_ERR_DIMENSION = 4,
  GDA_ERR_SOLVE = 5,
  GDA_ERR_INFEASIBLE_CENTER = 6,
  GDA_ERR_UNBOUNDED_DIRECTION = 7,
  GDA_ERR_EMPTY_VALIDATION = 8,
  GDA_ERR_INTERNAL = 9
} gda_status;

typedef enum gda_method {
  GDA_METHOD_UNIFORM = 0,
  GDA_METHOD_DM = 1,
  GDA_METHOD_KMM = 2,
  GDA_METHOD_FE = 3,
  GDA_METHOD_GDM = 4
} gda_method;

typedef enum gda_kernel_kind {
  GDA_KERNEL_LINEAR = 0,
  GDA_KERNEL_GAUSSIAN = 1
} gda_kernel_kind;

const char* gda_version(void);

/* Message for the most recent error on this thread ("" when none). */
const char* gda_last_error(void);

void gda_string_free(char* s);

/* ---- datasets ------------------------------------------------------- */

/* CSV schema: source and labeled-target files carry d feature columns plus
 * a label column; the target file carries d feature columns. Pass NULL for
 * target_labeled_csv when there is no labeled target sample. */
gda_status gda_dataset_load(const char* source_csv, const char* target_csv,
                            const char* target_labeled_csv, int skip_header,
                            gda_dataset** out);

/* Synthetic benchmark: source x ~ U[0.2, 1], target x ~ U[0, 0.25],
 * y = -x + x^3 + Normal(0, 0.1). */
gda_status gda_dataset_synth(uint64_t seed, int m, int n, int s, gda_dataset** out);

gda_status gda_dataset_save(const gda_dataset* ds, const char* source_csv,
                            const char* target_csv, const char* target_labeled_csv);

gda_status gda_dataset_dims(const gda_dataset* ds, int* m, int* n, int* s, int* d);

void gda_dataset_free(gda_dataset* ds);

/* ---- models ---------------------------------------------------------- */

/* Trains one adaptation method. sigma is ignored for linear kernels. For
 * GDA_METHOD_GDM, r is the surrogate-family radius (loss threshold) and
 * boundary_samples the per-ball sample count; both are ignored otherwise.
 * Pass r <= 0 with a labeled target sample present to select r by
 * validation. */
gda_status gda_fit(const gda_dataset* ds, gda_method method,
                   gda_kernel_kind kernel, double sigma, double lambda, double r,
                   int boundary_samples, uint64_t seed, gda_model** out);

/* x is row-major rows x dim; out must hold rows doubles. */
gda_status gda_model_predict(const gda_model* model, const double* x, int rows,
                             int dim, double* out);

gda_status gda_model_mse(const gda_model* model, const double* x, const double* y,
                         int rows, int dim, double* out_mse);

void gda_model_free(gda_model* model);

/* ---- experiment harness ---------------------------------------------- */

/* Config schemas are documented in the README; reports are deterministic
 * given the config. */
gda_status gda_run_experiment(const char* config_json, char** report_json);

gda_status gda_profile(const char* config_json, char** csv_out);

gda_status gda_validate_r(const char* config_json, char** table_json);

gda_status gda_export_sdp(const char* config_json, const char* out_path);

gda_status gda_synth_csv(uint64_t seed, int m, int n, int s, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GDA_GDA_H */
