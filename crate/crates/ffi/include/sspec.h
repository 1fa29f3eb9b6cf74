#ifndef SSPEC_H
#define SSPEC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum {
  SSPEC_STATUS_OK = 0,
  SSPEC_STATUS_NULL_POINTER = 1,
  SSPEC_STATUS_INVALID_INPUT = 2,
  SSPEC_STATUS_NUMERIC = 3,
  SSPEC_STATUS_BUFFER_TOO_SMALL = 4,
  SSPEC_STATUS_PANIC = 5,
} SspecStatus;

/**
 * Opaque quaternionic matrix.
 */
typedef struct SspecMatrix SspecMatrix;

/**
 * Opaque shift-plus-finite-rank operator.
 */
typedef struct SspecShiftOp SspecShiftOp;

typedef struct {
  size_t dim_ker;
  size_t dim_coker;
  int64_t index;
} SspecIndex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message (NUL-terminated, truncated to `cap`) into `buf` and
 * returns the full message length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t sspec_last_error(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sspec_version(void);

/**
 * Builds an `n×n` matrix from `4·n²` doubles, row-major, each entry as `w, x, y, z`.
 *
 * # Safety
 * `entries` must point to `4·n·n` readable doubles and `out` to a writable handle slot.
 */
SspecStatus sspec_matrix_new(size_t n, const double *entries, SspecMatrix **out);

/**
 * Parses a matrix from JSON `{"n": n, "entries": [[[w,x,y,z], ...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable handle slot.
 */
SspecStatus sspec_matrix_from_json(const char *json, SspecMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from this library that has not been freed.
 */
void sspec_matrix_free(SspecMatrix *m);

/**
 * Writes the S-spectrum as `(re, rad)` pairs into `out` (`2·cap` doubles) and the
 * number of spheres into `len`. Returns `BufferTooSmall` (with `len` set) if
 * `cap` spheres do not fit.
 *
 * # Safety
 * `m` must be a live handle, `out` must point to `2·cap` writable doubles (or be
 * null when `cap = 0`), and `len` must be writable.
 */
SspecStatus sspec_matrix_s_spectrum(const SspecMatrix *m, double *out, size_t cap, size_t *len);

/**
 * `σ_min(R_q(A))` for `q = (w, x, y, z)`.
 *
 * # Safety
 * `m` must be a live handle, `q` must point to 4 doubles and `out` be writable.
 */
SspecStatus sspec_matrix_sigma_min_at(const SspecMatrix *m, const double *q, double *out);

/**
 * One of `R`, `T`, `RT`, `V`, `Su`, `I`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable handle slot.
 */
SspecStatus sspec_shift_named(const char *name, SspecShiftOp **out);

/**
 * Parses `{"coeff", "power", "fin", "terms"?, "domain"?}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable handle slot.
 */
SspecStatus sspec_shift_from_json(const char *json, SspecShiftOp **out);

/**
 * # Safety
 * `op` must be null or a handle from this library that has not been freed.
 */
void sspec_shift_free(SspecShiftOp *op);

/**
 * `R_q(T)` as a new handle.
 *
 * # Safety
 * `op` must be a live handle, `q` must point to 4 doubles, `out` a writable slot.
 */
SspecStatus sspec_shift_char_elem(const SspecShiftOp *op, const double *q, SspecShiftOp **out);

/**
 * Kernel, cokernel and index. Non-Fredholm operators give `Numeric`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
SspecStatus sspec_shift_index(const SspecShiftOp *op, SspecIndex *out);

/**
 * Whether `R_q(T)` is Fredholm.
 *
 * # Safety
 * `op` must be a live handle, `q` must point to 4 doubles and `out` be writable.
 */
SspecStatus sspec_shift_fredholm_at(const SspecShiftOp *op, const double *q, bool *out);

/**
 * Norm estimate on the window of half-width `window`; `0` picks the window adaptively.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
SspecStatus sspec_shift_norm(const SspecShiftOp *op, size_t window, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSPEC_H */
