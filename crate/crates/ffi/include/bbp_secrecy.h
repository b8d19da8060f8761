#ifndef BBP_SECRECY_H
#define BBP_SECRECY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BbpStatus {
  BBP_STATUS_OK = 0,
  BBP_STATUS_NULL_POINTER = 1,
  BBP_STATUS_INVALID_PARAMETER = 2,
  BBP_STATUS_PROBABILITY_DOMAIN = 3,
  BBP_STATUS_NO_BLOCKS = 4,
  BBP_STATUS_ENUMERATION_TOO_LARGE = 5,
  BBP_STATUS_IO = 6,
  BBP_STATUS_PARSE = 7,
  BBP_STATUS_OUT_OF_RANGE = 8,
  BBP_STATUS_PANIC = 99,
} BbpStatus;

/**
 * Normalization of the deep-prefix leakage term.
 */
typedef enum BbpT3Variant {
  BBP_T3_VARIANT_AS_PRINTED = 0,
  BBP_T3_VARIANT_SUMMED_OVER_STATES = 1,
} BbpT3Variant;

/**
 * Probe size rule after detection.
 */
typedef enum BbpHalving {
  BBP_HALVING_AS_PRINTED = 0,
  BBP_HALVING_BISECTION = 1,
} BbpHalving;

typedef enum BbpT3Verdict {
  BBP_T3_VERDICT_NOT_ACTIVE = 0,
  BBP_T3_VERDICT_AS_PRINTED = 1,
  BBP_T3_VERDICT_SUMMED_OVER_STATES = 2,
  BBP_T3_VERDICT_BOTH = 3,
  BBP_T3_VERDICT_NEITHER = 4,
} BbpT3Verdict;

/**
 * Opaque verification report.
 */
typedef struct BbpReport BbpReport;

/**
 * Opaque exploration schedule.
 */
typedef struct BbpSchedule BbpSchedule;

typedef struct BbpBoundPoint {
  uint32_t k;
  size_t l;
  double b;
  double outer;
  double leakage;
  double inner_raw;
  double inner;
} BbpBoundPoint;

typedef struct BbpRateEstimates {
  double main_rate;
  double main_stderr;
  double leakage;
  double leakage_stderr;
  uint64_t blocks;
} BbpRateEstimates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL terminated,
 * truncated to `len - 1` bytes). Returns the full message length, or 0 when
 * there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t bbp_last_error(char *buf, size_t len);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum BbpStatus bbp_binary_entropy(double p, double *out);

/**
 * Outer bound, leakage and inner bound at `(K, B, L)`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum BbpStatus bbp_bound_point(uint32_t k,
                               double b,
                               size_t l,
                               enum BbpT3Variant t3,
                               struct BbpBoundPoint *out);

/**
 * # Safety
 * `out` must be null or valid for writes. The handle written there must be
 * released with [`bbp_schedule_free`].
 */
enum BbpStatus bbp_schedule_new(uint32_t k, double b, size_t l, struct BbpSchedule **out);

/**
 * # Safety
 * `schedule` must be null or a handle from [`bbp_schedule_new`] not yet freed.
 */
void bbp_schedule_free(struct BbpSchedule *schedule);

/**
 * Block length `L`, or 0 for a null handle.
 *
 * # Safety
 * `schedule` must be null or a live handle.
 */
size_t bbp_schedule_len(const struct BbpSchedule *schedule);

/**
 * Entry `j` (1-based) of the real schedule `c`, its floor and the partial
 * sum `cum_j`. Any of the out pointers may be null.
 *
 * # Safety
 * `schedule` must be a live handle; non-null out pointers must be writable.
 */
enum BbpStatus bbp_schedule_entry(const struct BbpSchedule *schedule,
                                  size_t j,
                                  double *c,
                                  uint32_t *c_int,
                                  double *cum);

/**
 * Monte Carlo estimates of the main rate and the leakage over `blocks`
 * blocks seeded with `seed`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum BbpStatus bbp_simulate(uint32_t k,
                            double b,
                            size_t l,
                            uint64_t blocks,
                            uint64_t seed,
                            enum BbpHalving rule,
                            struct BbpRateEstimates *out);

/**
 * Exact-enumeration verification of the closed forms.
 *
 * # Safety
 * `out` must be null or valid for writes. The handle written there must be
 * released with [`bbp_report_free`].
 */
enum BbpStatus bbp_verify(uint32_t k,
                          double b,
                          size_t l,
                          enum BbpHalving rule,
                          struct BbpReport **out);

/**
 * # Safety
 * `report` must be null or a handle from [`bbp_verify`] not yet freed.
 */
void bbp_report_free(struct BbpReport *report);

/**
 * 1 when every checked quantity matched, 0 otherwise or for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
int32_t bbp_report_all_matched(const struct BbpReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
enum BbpT3Verdict bbp_report_t3_verdict(const struct BbpReport *report);

/**
 * Rendered report text. Release with [`bbp_string_free`]; null for a null
 * handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *bbp_report_text(const struct BbpReport *report);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void bbp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BBP_SECRECY_H */
