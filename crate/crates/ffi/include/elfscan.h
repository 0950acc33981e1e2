#ifndef ELFSCAN_H
#define ELFSCAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum ElfscanStatus {
  ELFSCAN_STATUS_OK = 0,
  ELFSCAN_STATUS_NULL_POINTER = 1,
  ELFSCAN_STATUS_INVALID_INPUT = 2,
  ELFSCAN_STATUS_SINGULARITY = 3,
  ELFSCAN_STATUS_INFEASIBLE_K = 4,
  ELFSCAN_STATUS_TOO_LARGE = 5,
  ELFSCAN_STATUS_INVALID_STANDARD = 6,
  ELFSCAN_STATUS_PARSE = 7,
  ELFSCAN_STATUS_IO = 8,
  /**
   * Analysis finished but at least one experiment cell failed; output is still valid.
   */
  ELFSCAN_STATUS_PARTIAL_FAILURE = 9,
  ELFSCAN_STATUS_PANIC = 10,
} ElfscanStatus;

typedef enum ElfscanStandardKind {
  ELFSCAN_STANDARD_KIND_FIXED = 0,
  ELFSCAN_STANDARD_KIND_ICNIRP_PUBLIC = 1,
  ELFSCAN_STANDARD_KIND_ICNIRP_OCCUPATIONAL = 2,
  ELFSCAN_STANDARD_KIND_TCO2 = 3,
} ElfscanStandardKind;

typedef enum ElfscanIcnirpUnit {
  ELFSCAN_ICNIRP_UNIT_MILLITESLA = 0,
  ELFSCAN_ICNIRP_UNIT_MICROTESLA = 1,
} ElfscanIcnirpUnit;

/**
 * Result of a K-Medians run.
 */
typedef struct ElfscanClustering ElfscanClustering;

/**
 * Conductor geometry for field evaluation.
 */
typedef struct ElfscanWireModel ElfscanWireModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. Valid until the next call
 * into this library from the same thread.
 */
const char *elfscan_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *elfscan_version(void);

/**
 * RMS magnitude of one tri-axial sample, µT.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum ElfscanStatus elfscan_rms(double bx, double by, double bz, double *out);

/**
 * Limit of a safety standard in µT. `fixed_limit_ut` is read only for `Fixed`,
 * `frequency_hz` and `unit` only for the ICNIRP kinds.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum ElfscanStatus elfscan_limit_for(enum ElfscanStandardKind kind,
                                     double fixed_limit_ut,
                                     double frequency_hz,
                                     enum ElfscanIcnirpUnit unit,
                                     double *out);

/**
 * 1 if `value` strictly exceeds `limit`, else 0.
 */
int32_t elfscan_classify_point(double value, double limit);

/**
 * Clusters `n` values into `k` groups. With `use_seed` zero the first run is quantile
 * seeded; otherwise it is randomly seeded from `seed`.
 *
 * # Safety
 * `data` must point to `n` doubles and `out` must be valid for one write.
 */
enum ElfscanStatus elfscan_kmedians_run(const double *data,
                                        size_t n,
                                        size_t k,
                                        size_t restarts,
                                        int32_t use_seed,
                                        uint64_t seed,
                                        struct ElfscanClustering **out);

/**
 * # Safety
 * `c` must come from `elfscan_kmedians_run` and not be freed yet; null is allowed.
 */
void elfscan_clustering_free(struct ElfscanClustering *c);

/**
 * # Safety
 * `c` must be a live handle.
 */
size_t elfscan_clustering_k(const struct ElfscanClustering *c);

/**
 * # Safety
 * `c` must be a live handle.
 */
size_t elfscan_clustering_len(const struct ElfscanClustering *c);

/**
 * Objective J in µT; NaN for a null handle.
 *
 * # Safety
 * `c` must be a live handle.
 */
double elfscan_clustering_objective(const struct ElfscanClustering *c);

/**
 * # Safety
 * `c` must be a live handle.
 */
size_t elfscan_clustering_iterations(const struct ElfscanClustering *c);

/**
 * # Safety
 * `c` must be a live handle.
 */
int32_t elfscan_clustering_converged(const struct ElfscanClustering *c);

/**
 * Copies the centroids, sorted descending, into `out` which holds `len` doubles.
 *
 * # Safety
 * `c` must be a live handle and `out` valid for `len` writes.
 */
enum ElfscanStatus elfscan_clustering_centroids(const struct ElfscanClustering *c,
                                                double *out,
                                                size_t len);

/**
 * Copies per-datum cluster indices, in input order, into `out` which holds `len` entries.
 *
 * # Safety
 * `c` must be a live handle and `out` valid for `len` writes.
 */
enum ElfscanStatus elfscan_clustering_assignments(const struct ElfscanClustering *c,
                                                  size_t *out,
                                                  size_t len);

/**
 * Empty wire model. Never null.
 */
struct ElfscanWireModel *elfscan_wire_model_new(void);

/**
 * # Safety
 * `m` must come from `elfscan_wire_model_new` and not be freed yet; null is allowed.
 */
void elfscan_wire_model_free(struct ElfscanWireModel *m);

/**
 * Appends a polyline carrying `current_a` amperes. `xyz` holds `n_vertices` packed
 * `x, y, z` triples in meters.
 *
 * # Safety
 * `m` must be a live handle and `xyz` must point to `3 * n_vertices` doubles.
 */
enum ElfscanStatus elfscan_wire_model_add_path(struct ElfscanWireModel *m,
                                               const double *xyz,
                                               size_t n_vertices,
                                               double current_a);

/**
 * Field at `(x, y, z)` meters, written to `out` as `bx, by, bz` in µT.
 *
 * # Safety
 * `m` must be a live handle and `out` valid for three writes.
 */
enum ElfscanStatus elfscan_wire_model_field(const struct ElfscanWireModel *m,
                                            double x,
                                            double y,
                                            double z,
                                            double *out);

/**
 * Analyses a survey CSV and returns the JSON report through `out_json`.
 *
 * `standard` uses the CLI selector syntax (`fixed:0.3`, `icnirp-public`, ...), evaluated at
 * `frequency_hz` with ICNIRP levels in mT. Returns `PartialFailure` with a valid report when
 * some cells failed.
 *
 * # Safety
 * `path` and `standard` must be NUL-terminated strings; `out_json` valid for one write.
 */
enum ElfscanStatus elfscan_analyze_csv(const char *path,
                                       const char *standard,
                                       double frequency_hz,
                                       size_t k,
                                       size_t restarts,
                                       char **out_json);

/**
 * Releases a string returned by this library; null is allowed.
 *
 * # Safety
 * `s` must come from this library and not be freed yet.
 */
void elfscan_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ELFSCAN_H */
