#ifndef KCALC_H
#define KCALC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KcalcStatus {
  KCALC_STATUS_OK = 0,
  KCALC_STATUS_INVALID_INPUT = 1,
  KCALC_STATUS_PRECONDITION = 2,
  KCALC_STATUS_BUDGET = 3,
  KCALC_STATUS_VERIFICATION = 4,
  KCALC_STATUS_NULL_POINTER = 5,
  KCALC_STATUS_PANIC = 6,
} KcalcStatus;

/**
 * `K_0` data of an odometer crossed product over a finite level prefix.
 */
typedef struct KcalcOdometer KcalcOdometer;

/**
 * A prime power `q^r` on which `k` has multiplicative order `p^s`.
 */
typedef struct KcalcWitness {
  uint64_t q;
  uint32_t r;
  uint64_t order;
} KcalcWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread; valid until the next call
 * into this library from the same thread. Never null.
 */
const char *kcalc_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void kcalc_string_free(char *s);

/**
 * Build the odometer with levels `levels[0..len]`.
 *
 * # Safety
 * `levels` must point to `len` readable values and `out` must be writable.
 */
enum KcalcStatus kcalc_odometer_new(uint64_t k,
                                    const uint64_t *levels,
                                    size_t len,
                                    struct KcalcOdometer **out);

/**
 * # Safety
 * `h` must be null or a live handle from [`kcalc_odometer_new`].
 */
void kcalc_odometer_free(struct KcalcOdometer *h);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum KcalcStatus kcalc_odometer_stage_count(const struct KcalcOdometer *h, size_t *out);

/**
 * Decimal string of the stage modulus `k^{n_i} - 1` (0-based `stage`).
 * Free the result with [`kcalc_string_free`].
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum KcalcStatus kcalc_odometer_modulus(const struct KcalcOdometer *h, size_t stage, char **out);

/**
 * Whether every level carries a trivial-kernel certificate, i.e. `K_1 = 0`.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum KcalcStatus kcalc_odometer_k1_vanishes(const struct KcalcOdometer *h, bool *out);

/**
 * The smallest `q^r` with `ord_{q^r}(k) = p^s`. `budget_bits = 0` uses the
 * default factorization guard.
 *
 * # Safety
 * `out` must be writable.
 */
enum KcalcStatus kcalc_witness(uint64_t k,
                               uint64_t p,
                               uint32_t s,
                               uint32_t budget_bits,
                               struct KcalcWitness *out);

/**
 * Whether `f(j) = numers[j] / k^expos[j]` lies in the image of
 * `id - (1/k)T`.
 *
 * # Safety
 * `numers` and `expos` must point to `n` readable values; `out` writable.
 */
enum KcalcStatus kcalc_membership(uint64_t k,
                                  const int64_t *numers,
                                  const uint32_t *expos,
                                  size_t n,
                                  bool *out);

/**
 * Run a command line (`argv[0]` is the program name) and return its JSON
 * report. Free the result with [`kcalc_string_free`].
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; `out` writable.
 */
enum KcalcStatus kcalc_run_json(size_t argc, const char *const *argv, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KCALC_H */
