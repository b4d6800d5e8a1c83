#ifndef REDLAB_H
#define REDLAB_H

/* Generated by cbindgen from the redlab-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status code returned by every entry point.
 */
typedef enum RedlabStatus {
  REDLAB_OK = 0,
  /*
   Malformed input: bad probabilities, unknown name, empty data.
   */
  REDLAB_INVALID_ARGUMENT = 1,
  /*
   Structurally valid input outside a function's domain.
   */
  REDLAB_OUT_OF_DOMAIN = 2,
  /*
   A configured resource budget rejected the request.
   */
  REDLAB_RESOURCE_LIMIT = 3,
  /*
   An iterative method exhausted its budget.
   */
  REDLAB_NO_CONVERGENCE = 4,
  /*
   A required pointer was null.
   */
  REDLAB_NULL_POINTER = 5,
  /*
   The provided buffer is too small.
   */
  REDLAB_BUFFER_TOO_SMALL = 6,
  /*
   Unexpected internal failure.
   */
  REDLAB_INTERNAL = 7,
} RedlabStatus;

/*
 Opaque probability multiset handle.
 */
typedef struct RedlabDist RedlabDist;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Builds a distribution handle from `len` probabilities. On success the
 handle is written to `out` and must be released with
 [`redlab_dist_free`].

 # Safety
 `probs` must point to `len` readable doubles and `out` must be a valid
 destination for one pointer.
 */
enum RedlabStatus redlab_dist_new(const double *probs, size_t len, struct RedlabDist **out);

/*
 Releases a handle created by this library. A null pointer is ignored.

 # Safety
 `dist` must be null or a pointer previously returned by this library
 and not yet freed.
 */
void redlab_dist_free(struct RedlabDist *dist);

/*
 Number of symbols in the distribution.

 # Safety
 `dist` must be a live handle from this library.
 */
size_t redlab_dist_len(const struct RedlabDist *dist);

/*
 Entropy of the distribution in base `radix`.

 # Safety
 `dist` must be a live handle; `out` must be writable.
 */
enum RedlabStatus redlab_dist_entropy(const struct RedlabDist *dist, uint32_t radix, double *out);

/*
 Huffman redundancy of the distribution over a `radix`-letter alphabet.

 # Safety
 `dist` must be a live handle; `out` must be writable.
 */
enum RedlabStatus redlab_redundancy(const struct RedlabDist *dist, uint32_t radix, double *out);

/*
 Codeword length of every symbol, most likely first. `cap` is the
 capacity of `out`; the number of lengths is written to `written`.

 # Safety
 `dist` must be a live handle; `out` must hold `cap` u32 slots;
 `written` must be writable.
 */
enum RedlabStatus redlab_code_lengths(const struct RedlabDist *dist,
                                      uint32_t radix,
                                      uint32_t *out,
                                      size_t cap,
                                      size_t *written);

/*
 Largest Huffman redundancy for a source containing probability `p`.

 # Safety
 `out` must be writable.
 */
enum RedlabStatus redlab_r_max(double p, double *out);

/*
 Piecewise upper bound that caps the middle region at 1/2.

 # Safety
 `out` must be writable.
 */
enum RedlabStatus redlab_r_ub(double p, double *out);

/*
 Upper bound as a function of the most likely probability.

 # Safety
 `out` must be writable.
 */
enum RedlabStatus redlab_f_p1(double p1, double *out);

/*
 Smallest Huffman redundancy for a source containing probability `p`.
 `witness_m` (optional, may be null) receives the optimal depth.

 # Safety
 `out` must be writable; `witness_m` may be null or writable.
 */
enum RedlabStatus redlab_r_min(double p, double *out, uint32_t *witness_m);

/*
 Lower bound when `p` is the least likely symbol.

 # Safety
 `out` must be writable.
 */
enum RedlabStatus redlab_r_min_pn(double p, double *out);

/*
 D-ary lower bound for a source containing probability `p`.

 # Safety
 `out` must be writable; `witness_m` may be null or writable.
 */
enum RedlabStatus redlab_r_min_d(double p, uint32_t radix, double *out, uint32_t *witness_m);

/*
 Builds the lower-bound-achieving backbone distribution for `p` at its
 optimal depth and returns it as a new handle.

 # Safety
 `out` must be a valid destination for one pointer.
 */
enum RedlabStatus redlab_backbone(double p, struct RedlabDist **out);

/*
 Copies the probabilities out of a handle, most likely first. `cap` is
 the capacity of `out`; the count is written to `written`.

 # Safety
 `dist` must be a live handle; `out` must hold `cap` doubles;
 `written` must be writable.
 */
enum RedlabStatus redlab_dist_probs(const struct RedlabDist *dist,
                                    double *out,
                                    size_t cap,
                                    size_t *written);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* REDLAB_H */
