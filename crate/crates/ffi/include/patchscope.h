#ifndef PATCHSCOPE_H
#define PATCHSCOPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_ARGUMENT = 1,
  PS_STATUS_INVALID_INPUT = 2,
  PS_STATUS_PARSE = 3,
  PS_STATUS_DIMENSION_MISMATCH = 4,
  PS_STATUS_NON_CONVERGENCE = 5,
  PS_STATUS_UNBOUNDED = 6,
  // The point is not where the operation requires it (inside, outside,
  // singular, higher multiplicity, not supporting).
  PS_STATUS_DOMAIN = 7,
  PS_STATUS_EMPTY = 8,
  PS_STATUS_IO = 9,
  PS_STATUS_PANIC = 10,
} PsStatus;

// A convex body.
typedef struct PsBody PsBody;

// A hyperbolic polynomial with its direction.
typedef struct PsCone PsCone;

// Sampled normal-cycle pairs.
typedef struct PsPairs PsPairs;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call on this thread.
const char *ps_last_error(void);

// Library version, a static string.
const char *ps_version(void);

// Release a string returned by this library.
//
// # Safety
// `s` is null or came from this library and was not freed before.
void ps_string_free(char *s);

// Body from its JSON description.
//
// # Safety
// `json` is a NUL-terminated string; `out` is writable.
enum PsStatus ps_body_from_json(const char *json, struct PsBody **out);

// Body of a named gallery example.
//
// # Safety
// `name` is a NUL-terminated string; `out` is writable.
enum PsStatus ps_body_from_gallery(const char *name, struct PsBody **out);

// # Safety
// `b` is null or a live handle from this library.
void ps_body_free(struct PsBody *b);

// Ambient dimension; 0 for a null handle.
//
// # Safety
// `b` is null or a live handle.
size_t ps_body_dim(const struct PsBody *b);

// Metric projection of `x` (length `dim`) onto the body, written to `out`.
//
// # Safety
// `x` and `out` hold `dim` doubles.
enum PsStatus ps_body_project(const struct PsBody *b, const double *x, size_t dim, double *out);

// Support value `max <l, x>` and a maximiser (written to `maximizer`).
//
// # Safety
// `l` and `maximizer` hold `dim` doubles; `value` is writable.
enum PsStatus ps_body_support(const struct PsBody *b,
                              const double *l,
                              size_t dim,
                              double *value,
                              double *maximizer);

// Sample `n` normal-cycle pairs; `strategy` is `k1-rayshoot`,
// `dual-directions` or `primal-stab`.
//
// # Safety
// `strategy` is a NUL-terminated string; `out` is writable.
enum PsStatus ps_ncycle_sample(const struct PsBody *b,
                               size_t n,
                               const char *strategy,
                               uint64_t seed,
                               struct PsPairs **out);

// # Safety
// `p` is null or a live handle.
void ps_pairs_free(struct PsPairs *p);

// Number of pairs; 0 for a null handle.
//
// # Safety
// `p` is null or a live handle.
size_t ps_pairs_len(const struct PsPairs *p);

// Pair `i`: `x` and `ell` (each `dim` doubles) and its residual.
//
// # Safety
// `x` and `ell` hold the body dimension in doubles; `residual` is writable.
enum PsStatus ps_pairs_get(const struct PsPairs *p,
                           size_t i,
                           double *x,
                           double *ell,
                           double *residual);

// The pairs as JSON lines.
//
// # Safety
// `out` is writable; free the result with [`ps_string_free`].
enum PsStatus ps_pairs_to_jsonl(const struct PsPairs *p, char **out);

// Patch detection on `n_points` points of dimension `dim` (row major).
// `theta <= 0` selects the automatic threshold.  `body` may be null; when
// given, its defining polynomials label the facets.  Writes the report JSON.
//
// # Safety
// `points` holds `n_points * dim` doubles; `out` is writable.
enum PsStatus ps_patches_report(const double *points,
                                size_t n_points,
                                size_t dim,
                                const struct PsBody *body,
                                double theta,
                                char **out);

// Hausdorff distance between two point sets of dimension `dim`.
//
// # Safety
// `a` holds `na * dim` and `b` holds `nb * dim` doubles; `out` is writable.
enum PsStatus ps_hausdorff(const double *a,
                           size_t na,
                           const double *b,
                           size_t nb,
                           size_t dim,
                           double *out);

// Cone of `poly` (text form, or one of `lorentz`, `cayley`,
// `hyperb_quartic`) with direction `e` (comma-separated rationals).
//
// # Safety
// `poly` and `e` are NUL-terminated strings; `out` is writable.
enum PsStatus ps_cone_new(const char *poly, const char *e, struct PsCone **out);

// # Safety
// `c` is null or a live handle.
void ps_cone_free(struct PsCone *c);

// Exact membership of `x` (comma-separated rationals); writes 1 or 0.
//
// # Safety
// `x` is a NUL-terminated string; `out` is writable.
enum PsStatus ps_cone_contains(const struct PsCone *c, const char *x, int32_t *out);

// Floating-point membership of `x` (length `n`) with tolerance `tol`.
//
// # Safety
// `x` holds `n` doubles; `out` is writable.
enum PsStatus ps_cone_contains_f64(const struct PsCone *c,
                                   const double *x,
                                   size_t n,
                                   double tol,
                                   int32_t *out);

// Multiplicity of `x` (comma-separated rationals) as a boundary point.
//
// # Safety
// `x` is a NUL-terminated string; `out` is writable.
enum PsStatus ps_cone_multiplicity(const struct PsCone *c, const char *x, size_t *out);

// Dimension of the face containing the regular boundary point `x`.
//
// # Safety
// `x` is a NUL-terminated string; `out` is writable.
enum PsStatus ps_cone_face_dim(const struct PsCone *c, const char *x, size_t *out);

// Monte Carlo hyperbolicity check; writes the certificate JSON.
//
// # Safety
// `out` is writable; free the result with [`ps_string_free`].
enum PsStatus ps_cone_check(const struct PsCone *c, size_t samples, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATCHSCOPE_H */
