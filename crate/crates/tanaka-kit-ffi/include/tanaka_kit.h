#ifndef TANAKA_KIT_H
#define TANAKA_KIT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Include bracket inclusion checks in a tube report.
 */
#define TK_TUBE_INCLUSIONS 1

/**
 * Include normalized sections in a tube report.
 */
#define TK_TUBE_SECTIONS 2

/**
 * Include symmetry checks in a tube report.
 */
#define TK_TUBE_SYMMETRIES 4

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  TK_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TK_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TK_STATUS_INVALID_UTF8 = 2,
  /**
   * The input document was malformed or inconsistent.
   */
  TK_STATUS_INVALID_INPUT = 3,
  /**
   * The computation could not be carried out on valid input.
   */
  TK_STATUS_COMPUTATION = 4,
  /**
   * An output buffer was too small; the required length was written.
   */
  TK_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * An internal panic was caught at the boundary.
   */
  TK_STATUS_PANIC = 6,
} TkStatus;

/**
 * Tube model construction.
 */
typedef enum {
  /**
   * `ψ = rγ + sγ'`.
   */
  TK_VARIANT_TANGENT = 0,
  /**
   * `ψ = γ + rγ' + sγ''`.
   */
  TK_VARIANT_OSCULATING = 1,
} TkVariant;

/**
 * Outcome of eliminating a deformation system.
 */
typedef enum {
  TK_VERDICT_INCONSISTENT = 0,
  TK_VERDICT_CONSISTENT = 1,
  TK_VERDICT_RESIDUAL = 2,
} TkVerdict;

/**
 * A Lie algebra with a graded or filtered basis.
 */
typedef struct TkAlgebra TkAlgebra;

/**
 * A Tanaka prolongation computed up to some degree.
 */
typedef struct TkProlongation TkProlongation;

/**
 * A tube over a curve (or the hyperquadric model).
 */
typedef struct TkTube TkTube;

/**
 * Ranks of the Freeman filtration of a tube model.
 */
typedef struct {
  bool bracket_generating;
  size_t d10;
  size_t k10;
  size_t l10;
  bool hol_nondeg;
  bool three_nondegenerate;
} TkFreemanRanks;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * successful one. Valid until the next `tk_*` call on the same thread.
 */
const char *tk_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *tk_version(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void tk_string_free(char *s);

/**
 * Parse a `liealg.v1` JSON document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out_alg` must be writable.
 */
TkStatus tk_algebra_from_json(const char *json, TkAlgebra **out_alg);

/**
 * Dimension of the algebra; 0 for a null handle.
 *
 * # Safety
 * `alg` must be null or a live handle.
 */
size_t tk_algebra_dim(const TkAlgebra *alg);

/**
 * Whether the bracket table satisfies the Jacobi identity.
 *
 * # Safety
 * `alg` must be a live handle; `out_ok` must be writable.
 */
TkStatus tk_algebra_check_jacobi(const TkAlgebra *alg, bool *out_ok);

/**
 * Release an algebra. Null is ignored.
 *
 * # Safety
 * `alg` must be null or a live handle from this library.
 */
void tk_algebra_free(TkAlgebra *alg);

/**
 * Tanaka prolongation of the negative part of `alg` up to degree `kmax`.
 *
 * # Safety
 * `alg` must be a live handle; `out_prolongation` must be writable.
 */
TkStatus tk_prolong(const TkAlgebra *alg, size_t kmax, TkProlongation **out_prolongation);

/**
 * Total dimension of the prolonged algebra; 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t tk_prolongation_total(const TkProlongation *p);

/**
 * Copy the dimensions of the positive degrees `1..=kmax` into `buf`.
 * `out_len` receives the number of degrees; if `cap` is smaller, nothing is
 * copied and `TK_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `p` must be a live handle; `buf` must hold `cap` elements (may be null
 * when `cap` is 0); `out_len` must be writable.
 */
TkStatus tk_prolongation_dims(const TkProlongation *p, size_t *buf, size_t cap, size_t *out_len);

/**
 * Whether the prolongation vanished at some degree `<= kmax`.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
bool tk_prolongation_terminated(const TkProlongation *p);

/**
 * JSON report: dimensions, basis cochains and genericity assumptions.
 *
 * # Safety
 * `p` must be a live handle; `out_json` must be writable.
 */
TkStatus tk_prolongation_report_json(const TkProlongation *p, char **out_json);

/**
 * Release a prolongation. Null is ignored.
 *
 * # Safety
 * `p` must be null or a live handle from this library.
 */
void tk_prolongation_free(TkProlongation *p);

/**
 * Build a tube model from a `curve.v1` JSON document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out_tube` must be writable.
 */
TkStatus tk_tube_from_curve_json(const char *json, TkVariant variant, TkTube **out_tube);

/**
 * The tube model of the hyperquadric.
 *
 * # Safety
 * `out_tube` must be writable.
 */
TkStatus tk_tube_hyperquadric(TkTube **out_tube);

/**
 * Freeman filtration ranks of the tube.
 *
 * # Safety
 * `tube` must be a live handle; `out_ranks` must be writable.
 */
TkStatus tk_tube_ranks(const TkTube *tube, TkFreemanRanks *out_ranks);

/**
 * JSON tube report; `flags` is a combination of `TK_TUBE_*`.
 *
 * # Safety
 * `tube` must be a live handle; `out_json` must be writable.
 */
TkStatus tk_tube_report_json(const TkTube *tube, uint32_t flags, char **out_json);

/**
 * Release a tube. Null is ignored.
 *
 * # Safety
 * `tube` must be null or a live handle from this library.
 */
void tk_tube_free(TkTube *tube);

/**
 * Eliminate the deformation system of a `deform.v1` document. Writes the
 * verdict and, if `out_json` is non-null, the full JSON report with branch
 * traces and certificates.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out_verdict` must be writable;
 * `out_json` may be null.
 */
TkStatus tk_deform_json(const char *json, TkVerdict *out_verdict, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TANAKA_KIT_H */
