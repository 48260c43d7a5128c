#ifndef WELCH_H
#define WELCH_H

/* Generated by cbindgen. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum WelchStatus {
  WELCH_STATUS_OK = 0,
  WELCH_STATUS_NULL_POINTER = 1,
  WELCH_STATUS_INVALID_ARGUMENT = 2,
  WELCH_STATUS_NOT_PRIME = 3,
  WELCH_STATUS_ZERO_EXPONENT = 4,
  WELCH_STATUS_NON_UNIT = 5,
  WELCH_STATUS_ODD_PRIME_REQUIRED = 6,
  WELCH_STATUS_TWO_REQUIRED = 7,
  WELCH_STATUS_NOT_PRIMITIVE_ROOT = 8,
  WELCH_STATUS_NOT_A_SOLUTION = 9,
  WELCH_STATUS_TOO_LARGE = 10,
  WELCH_STATUS_BUFFER_TOO_SMALL = 11,
  WELCH_STATUS_INTERNAL = 12,
  WELCH_STATUS_PANIC = 13,
} WelchStatus;

/**
 * Opaque instance `(p, e, g)`.
 */
typedef struct WelchHandle WelchHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an instance for prime `p`, exponent `e >= 1` and unit `g`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum WelchStatus welch_instance_new(uint64_t p, uint32_t e, int64_t g, struct WelchHandle **out);

/**
 * Like [`welch_instance_new`] with `g` given as a decimal string.
 *
 * # Safety
 * `g` must be a NUL-terminated string; `out` as in [`welch_instance_new`].
 */
enum WelchStatus welch_instance_new_str(uint64_t p,
                                        uint32_t e,
                                        const char *g,
                                        struct WelchHandle **out);

/**
 * Releases an instance. Passing NULL is a no-op.
 *
 * # Safety
 * `h` must come from [`welch_instance_new`] and not have been freed.
 */
void welch_instance_free(struct WelchHandle *h);

/**
 * Writes `p^e`, `m = ord_p(g)` and `ord_{p^e}(g)`. Any output pointer may be NULL.
 *
 * # Safety
 * `h` must be a live handle; non-NULL outputs must be writable.
 */
enum WelchStatus welch_instance_orders(const struct WelchHandle *h,
                                       uint64_t *out_pe,
                                       uint64_t *out_m,
                                       uint64_t *out_ord_pe);

/**
 * `f(x, c) = g^(x-1+c) - x (mod p^e)`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum WelchStatus welch_f(const struct WelchHandle *h, int64_t x, int64_t c, uint64_t *out);

/**
 * Solutions `x` for fixed `c` over one period (`{1..m*p^e}`, or `{1..2^e}`
 * when `p = 2`). `*out_len` always receives the number of solutions; if it
 * exceeds `capacity` nothing is copied and `BufferTooSmall` is returned.
 *
 * # Safety
 * `h` must be a live handle, `out_xs` writable for `capacity` values and
 * `out_len` writable.
 */
enum WelchStatus welch_solve_fixed_c(const struct WelchHandle *h,
                                     int64_t c,
                                     int64_t *out_xs,
                                     size_t capacity,
                                     size_t *out_len);

/**
 * All solution pairs on the canonical grid (odd `p`), as parallel arrays.
 *
 * # Safety
 * `out_x` and `out_c` must be writable for `capacity` values; `out_len` writable.
 */
enum WelchStatus welch_solve_all_pairs(const struct WelchHandle *h,
                                       int64_t *out_x,
                                       int64_t *out_c,
                                       size_t capacity,
                                       size_t *out_len);

/**
 * Number of `c in {1..m*p^(e-1)}` with `g^(x-1+c) = x (mod p^e)`.
 *
 * # Safety
 * `h` must be a live handle and `out_count` writable.
 */
enum WelchStatus welch_count_c_for_fixed_x(const struct WelchHandle *h,
                                           int64_t x,
                                           uint64_t *out_count);

/**
 * Splits `g = omega * one_unit (mod p^e)`.
 *
 * # Safety
 * `h` must be a live handle; outputs writable.
 */
enum WelchStatus welch_teichmuller(const struct WelchHandle *h,
                                   uint64_t *out_omega,
                                   uint64_t *out_one_unit);

/**
 * JSON report for fixed `c` (`{1..m*p^e}`, or `{1..2^e}` for `p = 2`).
 * Release the string with [`welch_string_free`].
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum WelchStatus welch_solve_fixed_c_json(const struct WelchHandle *h, int64_t c, char **out);

/**
 * JSON report of all solution pairs (odd `p`).
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum WelchStatus welch_solve_all_pairs_json(const struct WelchHandle *h, char **out);

/**
 * Releases a string returned by this library. Passing NULL is a no-op.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void welch_string_free(char *s);

/**
 * Message for the last failed call on this thread, or "" after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *welch_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *welch_status_name(enum WelchStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WELCH_H */
