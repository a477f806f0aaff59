#ifndef HYPERIDEAL_H
#define HYPERIDEAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum HiStatus {
  HI_STATUS_OK = 0,
  HI_STATUS_NULL_POINTER = 1,
  HI_STATUS_INVALID_INPUT = 2,
  // The flow stopped before reaching its residual tolerance. The result
  // handle is still written.
  HI_STATUS_NOT_CONVERGED = 3,
  HI_STATUS_NUMERICAL = 4,
  HI_STATUS_BUFFER_TOO_SMALL = 5,
  HI_STATUS_PANIC = 6,
} HiStatus;

// Opaque result of one flow run.
typedef struct HiFlowResult HiFlowResult;

// Opaque triangulation handle.
typedef struct HiTriangulation HiTriangulation;

// Flow settings. Start from [`hi_flow_config_default`].
typedef struct HiFlowConfig {
  double residual_tolerance;
  double max_time;
  double initial_step;
  double min_step;
  double max_step;
  double step_tolerance;
  double quadrature_tolerance;
} HiFlowConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hi_version(void);

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to fit) and returns the full message length in bytes.
//
// # Safety
// `buf` must be valid for `cap` bytes when non-null.
size_t hi_last_error_message(char *buf, size_t cap);

// Builds a triangulation from `tets` rows of six edge-class labels stored
// contiguously in `labels`.
//
// # Safety
// `labels` must point to `6 * tets` readable values and `out` must be a
// valid pointer.
enum HiStatus hi_triangulation_from_labels(const size_t *labels,
                                           size_t tets,
                                           struct HiTriangulation **out);

// Parses a triangulation from the JSON input format (either edge labels or
// face gluings).
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum HiStatus hi_triangulation_from_json(const char *json, struct HiTriangulation **out);

// # Safety
// `tri` must come from a `hi_triangulation_from_*` call and not be freed
// twice. Null is ignored.
void hi_triangulation_free(struct HiTriangulation *tri);

// Number of edge classes; 0 for a null handle.
//
// # Safety
// `tri` must be a live handle or null.
size_t hi_triangulation_edge_classes(const struct HiTriangulation *tri);

// Number of tetrahedra; 0 for a null handle.
//
// # Safety
// `tri` must be a live handle or null.
size_t hi_triangulation_tetrahedra(const struct HiTriangulation *tri);

// Writes the valence of each edge class into `out`.
//
// # Safety
// `tri` must be a live handle and `out` valid for `cap` writes.
enum HiStatus hi_triangulation_valences(const struct HiTriangulation *tri, size_t *out, size_t cap);

// Writes the default starting lengths (one per edge class) into `out`.
//
// # Safety
// `tri` must be a live handle, `out` valid for `cap` writes and `len` null
// or writable.
enum HiStatus hi_default_initial_metric(const struct HiTriangulation *tri,
                                        double *out,
                                        size_t cap,
                                        size_t *len);

// Curvature of each edge class at the given lengths.
//
// # Safety
// `lengths` must hold `n` values, `out` must be valid for `n` writes.
enum HiStatus hi_curvature(const struct HiTriangulation *tri,
                           const double *lengths,
                           size_t n,
                           double *out);

struct HiFlowConfig hi_flow_config_default(void);

// Runs the flow. `initial` may be null to start from the default metric;
// otherwise it holds one length per edge class. `config` may be null for
// defaults. On [`HiStatus::Ok`] and [`HiStatus::NotConverged`] a result
// handle is written to `out`.
//
// # Safety
// `tri` must be a live handle, `initial` null or valid for `n` reads,
// `config` null or valid, and `out` a valid pointer.
enum HiStatus hi_flow_run(const struct HiTriangulation *tri,
                          const double *initial,
                          size_t n,
                          const struct HiFlowConfig *config,
                          struct HiFlowResult **out);

// # Safety
// `result` must come from [`hi_flow_run`] and not be freed twice. Null is
// ignored.
void hi_flow_result_free(struct HiFlowResult *result);

// # Safety
// `result` must be a live handle or null.
bool hi_flow_result_converged(const struct HiFlowResult *result);

// Final `max |K_e|`; NaN for a null handle.
//
// # Safety
// `result` must be a live handle or null.
double hi_flow_result_residual(const struct HiFlowResult *result);

// Flow time reached; NaN for a null handle.
//
// # Safety
// `result` must be a live handle or null.
double hi_flow_result_time(const struct HiFlowResult *result);

// Number of accepted integrator steps.
//
// # Safety
// `result` must be a live handle or null.
size_t hi_flow_result_steps(const struct HiFlowResult *result);

// Writes the final lengths. `len` receives the class count even when the
// buffer is too small.
//
// # Safety
// `result` must be a live handle, `out` valid for `cap` writes and `len`
// null or writable.
enum HiStatus hi_flow_result_lengths(const struct HiFlowResult *result,
                                     double *out,
                                     size_t cap,
                                     size_t *len);

// Extended dihedral angles of one tetrahedron from its six edge lengths.
//
// # Safety
// `lengths` must hold 6 readable values and `out` 6 writable ones.
enum HiStatus hi_dihedral_angles(const double *lengths, double *out);

// Whether six edge lengths describe a genuine hyper-ideal tetrahedron.
//
// # Safety
// `lengths` must hold 6 readable values and `out` be writable.
enum HiStatus hi_is_hyperideal(const double *lengths, bool *out);

double hi_lobachevsky(double theta);

double hi_xi_infinity(void);

// `b_n` for valence `n >= 9`.
//
// # Safety
// `out` must be writable.
enum HiStatus hi_b_n(size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERIDEAL_H */
