#ifndef LAGMATCH_H
#define LAGMATCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LmStatus {
  LM_STATUS_OK = 0,
  LM_STATUS_NULL_POINTER = 1,
  // Malformed input or invalid parameter.
  LM_STATUS_SCHEMA = 2,
  // Input parsed but is mathematically inconsistent.
  LM_STATUS_INCONSISTENT = 3,
  // Sampling too coarse for the Conley–Zehnder routine.
  LM_STATUS_RESOLUTION = 4,
  // A result does not fit in 64 bits.
  LM_STATUS_OVERFLOW = 5,
  LM_STATUS_BUFFER_TOO_SMALL = 6,
  LM_STATUS_PANIC = 7,
} LmStatus;

// Closed Morse cycle.
typedef struct LmMorseCycle LmMorseCycle;

// Integral symplectic matrix.
typedef struct LmSpMatrix LmSpMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static nul-terminated string.
const char *lm_version(void);

// Message for the last failed call on this thread, or NULL.
//
// The pointer stays valid until the next library call on the same thread.
const char *lm_last_error(void);

// Builds a `2g x 2g` symplectic matrix from `len = 4g^2` row-major entries.
//
// # Safety
// `entries` must point to `len` readable `int64_t` values and `out` must be writable.
enum LmStatus lm_spmatrix_new(size_t genus,
                              const int64_t *entries,
                              size_t len,
                              struct LmSpMatrix **out);

// # Safety
// `m` must be NULL or a handle from [`lm_spmatrix_new`] not yet freed.
void lm_spmatrix_free(struct LmSpMatrix *m);

// Coefficients `a_0, ..., a_g` of the symmetrized Alexander polynomial of
// the mapping torus of `m`.
//
// Writes the count to `out_len`; when `cap` is too small nothing else is
// written and the status is `BufferTooSmall`.
//
// # Safety
// `m` must be a live handle, `out` must have room for `cap` values and
// `out_len` must be writable.
enum LmStatus lm_alexander_coeffs(const struct LmSpMatrix *m,
                                  int64_t *out,
                                  size_t cap,
                                  size_t *out_len);

// Supertrace of the twist map of `m` on the `n`-point model, as `num/den`.
//
// # Safety
// `m` must be a live handle; `num` and `den` must be writable.
enum LmStatus lm_twist_supertrace(const struct LmSpMatrix *m,
                                  uint32_t n,
                                  size_t threads,
                                  int64_t *num,
                                  int64_t *den);

// `Σ_i i a_{g-1-n+i}` from the Alexander coefficients of `m`.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum LmStatus lm_alexander_weighted_sum(const struct LmSpMatrix *m, uint32_t n, int64_t *out);

// `(c1^2 − 2e − 3σ) / 4`.
//
// # Safety
// `out` must be writable.
enum LmStatus lm_formal_dimension(int64_t c1_squared,
                                  int64_t euler,
                                  int64_t signature,
                                  int64_t *out);

// Parses the `morse_cycle` section of a JSON document.
//
// # Safety
// `document` must be a nul-terminated string and `out` writable.
enum LmStatus lm_cycle_from_json(const char *document, struct LmMorseCycle **out);

// # Safety
// `c` must be NULL or a handle from [`lm_cycle_from_json`] not yet freed.
void lm_cycle_free(struct LmMorseCycle *c);

// Supertrace of the cycle's monodromy as `num/den`, defined up to sign.
//
// # Safety
// `c` must be a live handle; `num` and `den` must be writable.
enum LmStatus lm_cycle_evaluate(const struct LmMorseCycle *c,
                                size_t threads,
                                int64_t *num,
                                int64_t *den);

// Runs `dim`, `tqft-eval`, `cz` or `gradings` on a JSON document and
// returns the report the command-line tool would print.
//
// # Safety
// `command` and `document` must be nul-terminated strings; `out` must be
// writable. The returned string is released with [`lm_string_free`].
enum LmStatus lm_run(const char *command,
                     const char *document,
                     bool json,
                     size_t threads,
                     char **out);

// Report for a built-in worked example.
//
// # Safety
// `name` must be a nul-terminated string and `out` writable.
enum LmStatus lm_example(const char *name, int64_t m, int64_t n, bool json, char **out);

// # Safety
// `s` must be NULL or a string returned by this library not yet freed.
void lm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAGMATCH_H */
