#ifndef DENTROPY_H
#define DENTROPY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DentStatus {
  DENT_STATUS_OK = 0,
  DENT_STATUS_NULL_POINTER = 1,
  DENT_STATUS_INVALID_DISTRIBUTION = 2,
  DENT_STATUS_INVALID_PARAMETER = 3,
  DENT_STATUS_ZERO_MASS_UNDEFINED = 4,
  DENT_STATUS_WRONG_FAMILY = 5,
  DENT_STATUS_DEGENERATE_VARIANCE = 6,
  DENT_STATUS_BUFFER_TOO_SMALL = 7,
  DENT_STATUS_PANIC = 8,
  DENT_STATUS_INTERNAL = 9,
} DentStatus;

typedef enum DentFamily {
  DENT_FAMILY_SHANNON = 0,
  DENT_FAMILY_RENYI = 1,
  DENT_FAMILY_TSALLIS = 2,
  DENT_FAMILY_LANDSBERG_VEDRAL = 3,
  DENT_FAMILY_ABE = 4,
  DENT_FAMILY_KAPPA = 5,
  DENT_FAMILY_VARMA = 6,
} DentFamily;

/**
 * Opaque category counts.
 */
typedef struct DentCounts DentCounts;

/**
 * Opaque probability mass function.
 */
typedef struct DentPmf DentPmf;

/**
 * Family selector. Only the parameters the family uses are read.
 */
typedef struct DentKind {
  enum DentFamily family;
  double alpha;
  double beta;
  double kappa;
} DentKind;

typedef struct DentAsymptotics {
  double a_constant;
  double variance;
} DentAsymptotics;

typedef struct DentEstimate {
  double point;
  double variance;
  double std_error;
  double ci_low;
  double ci_high;
  double level;
  uint64_t n;
  uint64_t unobserved;
  /**
   * 1 when the Miller–Madow shift was applied.
   */
  int32_t miller_madow;
} DentEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a pmf over labels `"1".."len"`. Masses must be positive and sum to
 * one within 1e-9.
 *
 * # Safety
 * `probs` must point to `len` doubles; `out` must be a valid pointer.
 */
enum DentStatus dent_pmf_new(const double *probs, size_t len, struct DentPmf **out);

/**
 * # Safety
 * `pmf` must be NULL or a handle from [`dent_pmf_new`] not yet freed.
 */
void dent_pmf_free(struct DentPmf *pmf);

/**
 * Number of categories, or 0 for NULL.
 *
 * # Safety
 * `pmf` must be NULL or a live handle.
 */
size_t dent_pmf_len(const struct DentPmf *pmf);

/**
 * # Safety
 * `counts` must point to `len` integers; `out` must be a valid pointer.
 */
enum DentStatus dent_counts_new(const uint64_t *counts, size_t len, struct DentCounts **out);

/**
 * Draws `n` i.i.d. observations. The same `seed` always yields the same
 * counts.
 *
 * # Safety
 * `pmf` must be a live handle; `out` must be a valid pointer.
 */
enum DentStatus dent_pmf_sample(const struct DentPmf *pmf,
                                uint64_t n,
                                uint64_t seed,
                                struct DentCounts **out);

/**
 * # Safety
 * `counts` must be NULL or a live handle.
 */
void dent_counts_free(struct DentCounts *counts);

/**
 * Number of categories, or 0 for NULL.
 *
 * # Safety
 * `counts` must be NULL or a live handle.
 */
size_t dent_counts_len(const struct DentCounts *counts);

/**
 * Copies the counts into `buf`, which must hold at least
 * [`dent_counts_len`] elements.
 *
 * # Safety
 * `counts` must be a live handle; `buf` must point to `len` writable
 * integers.
 */
enum DentStatus dent_counts_get(const struct DentCounts *counts, uint64_t *buf, size_t len);

/**
 * Entropy of the pmf in nats.
 *
 * # Safety
 * `pmf` must be a live handle; `out` must be a valid pointer.
 */
enum DentStatus dent_true_entropy(const struct DentPmf *pmf, struct DentKind kind, double *out);

/**
 * Almost-sure rate constant and CLT variance at the pmf.
 *
 * # Safety
 * `pmf` must be a live handle; `out` must be a valid pointer.
 */
enum DentStatus dent_asymptotic_constants(const struct DentPmf *pmf,
                                          struct DentKind kind,
                                          struct DentAsymptotics *out);

/**
 * Plug-in estimate with a two-sided normal interval at `level`.
 *
 * # Safety
 * `counts` must be a live handle; `out` must be a valid pointer.
 */
enum DentStatus dent_estimate(const struct DentCounts *counts,
                              struct DentKind kind,
                              double level,
                              struct DentEstimate *out);

/**
 * Shannon plug-in estimate shifted by the Miller–Madow term.
 *
 * # Safety
 * `counts` must be a live handle; `out` must be a valid pointer.
 */
enum DentStatus dent_miller_madow(const struct DentCounts *counts,
                                  double level,
                                  struct DentEstimate *out);

/**
 * Zhang's Shannon estimator.
 *
 * # Safety
 * `counts` must be a live handle; `out` must be a valid pointer.
 */
enum DentStatus dent_zhang(const struct DentCounts *counts, double *out);

/**
 * Static description of a status code.
 */
const char *dent_status_message(enum DentStatus status);

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to fit). Returns the full message length excluding
 * the terminator, or 0 when the last call succeeded.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t dent_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DENTROPY_H */
