#ifndef TENSORID_H
#define TENSORID_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Outcome of the first-order check; `VACUOUS` when the span fills the ambient space.
 */
typedef enum TidCheck {
  TID_CHECK_PASS = 0,
  TID_CHECK_FAIL = 1,
  TID_CHECK_VACUOUS = 2,
} TidCheck;

typedef enum TidMode {
  TID_MODE_FIRST_ORDER = 0,
  TID_MODE_GROEBNER = 1,
  TID_MODE_BOTH = 2,
} TidMode;

typedef enum TidStatus {
  TID_STATUS_OK = 0,
  TID_STATUS_INVALID_ARGUMENT = 1,
  TID_STATUS_NULL_POINTER = 2,
  TID_STATUS_COMPUTATION_ABORTED = 3,
  TID_STATUS_INTERNAL = 4,
} TidStatus;

typedef enum TidVerdict {
  TID_VERDICT_PASS = 0,
  TID_VERDICT_FAIL = 1,
  TID_VERDICT_KNOWN_EXCEPTION = 2,
  TID_VERDICT_INCOMPLETE = 3,
} TidVerdict;

/*
 Opaque certificate handle.
 */
typedef struct TidCertificate TidCertificate;

/*
 Run configuration; fill with [`tid_config_default`] before changing fields.
 */
typedef struct TidConfig {
  uint32_t prime;
  uint64_t seed;
  uint32_t trials;
  enum TidMode mode;
  /*
   Gröbner work limit in term operations.
   */
  uint64_t budget;
} TidConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty if none. The
 pointer stays valid until the next failing call on the same thread.
 */
const char *tid_last_error_message(void);

/*
 Fills `out` with the defaults the command-line tool uses.

 # Safety
 `out` must be null or valid for writes.
 */
enum TidStatus tid_config_default(struct TidConfig *out);

/*
 Certifies the problem `(dims[0..n]; k; aux[0..n])`. `aux` and `config` may
 be null (no aux points, default configuration). On success `*out` owns a
 new handle.

 # Safety
 `dims` (and `aux` if non-null) must point to `n` values; `config` must be
 null or valid; `out` must be valid for writes.
 */
enum TidStatus tid_certify(const size_t *dims,
                           size_t n,
                           size_t k,
                           const size_t *aux,
                           const struct TidConfig *config,
                           struct TidCertificate **out);

/*
 # Safety
 `cert` must be null or a live handle; `out` must be valid for writes.
 */
enum TidStatus tid_certificate_verdict(const struct TidCertificate *cert, enum TidVerdict *out);

/*
 Canonical JSON of the certificate; free `*out` with [`tid_string_free`].

 # Safety
 `cert` must be null or a live handle; `out` must be valid for writes.
 */
enum TidStatus tid_certificate_json(const struct TidCertificate *cert, char **out);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void tid_string_free(char *s);

/*
 # Safety
 `cert` must be null or a live handle, not used afterwards.
 */
void tid_certificate_free(struct TidCertificate *cert);

/*
 Largest `k` whose expected secant dimension fits the ambient space.

 # Safety
 `dims` must point to `n` values; `out` must be valid for writes.
 */
enum TidStatus tid_k_max(const size_t *dims, size_t n, uint64_t *out);

/*
 Identifiability bound from the power-of-`base` reductions.

 # Safety
 `dims` must point to `n` values; `out` must be valid for writes.
 */
enum TidStatus tid_co_bound(const size_t *dims, size_t n, uint64_t base, uint64_t *out);

/*
 Largest `k` satisfying Kruskal's inequality.

 # Safety
 `dims` must point to `n` values; `out` must be valid for writes.
 */
enum TidStatus tid_kruskal_max(const size_t *dims, size_t n, uint64_t *out);

/*
 Randomized first-order check of `(dims; k; aux)` over `F_prime`.
 `out_span_rank` may be null.

 # Safety
 `dims` (and `aux` if non-null) must point to `n` values; `out` must be
 valid for writes, as must `out_span_rank` when non-null.
 */
enum TidStatus tid_check_not_wdef(const size_t *dims,
                                  size_t n,
                                  size_t k,
                                  const size_t *aux,
                                  uint32_t prime,
                                  uint64_t seed,
                                  uint32_t trials,
                                  enum TidCheck *out,
                                  size_t *out_span_rank);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TENSORID_H */
