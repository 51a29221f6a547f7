#ifndef SUMLEVEL_H
#define SUMLEVEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Operator engines.
 */
typedef enum SlEngine {
  SL_ENGINE_INDUCED = 0,
  SL_ENGINE_GRID = 1,
} SlEngine;

/**
 * Interval families of a level.
 */
typedef enum SlFamilyKind {
  SL_FAMILY_KIND_C = 0,
  SL_FAMILY_KIND_COMPLEMENT = 1,
  SL_FAMILY_KIND_ALL = 2,
  SL_FAMILY_KIND_EVEN = 3,
} SlFamilyKind;

/**
 * Status codes.
 */
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_DOMAIN = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_GUARD = 3,
  SL_STATUS_CHECKPOINT = 4,
  SL_STATUS_IO = 5,
  SL_STATUS_NULL_POINTER = 6,
  SL_STATUS_BUFFER_TOO_SMALL = 7,
  SL_STATUS_PANIC = 8,
} SlStatus;

/**
 * Opaque list of intervals.
 */
typedef struct SlFamily SlFamily;

/**
 * Opaque iterated transfer operator.
 */
typedef struct SlOperator SlOperator;

/**
 * A closed interval `[left_num/left_den, right_num/right_den]`.
 */
typedef struct SlInterval {
  uint64_t left_num;
  uint64_t left_den;
  uint64_t right_num;
  uint64_t right_den;
} SlInterval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf`.
 *
 * # Safety
 * `buf` must be valid for `len` bytes; `written` may be null.
 */
enum SlStatus sl_last_error(char *buf, size_t len, size_t *written);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/**
 * λ(Cₙ) as an exact fraction `"p/q"` in `buf` and as a double in `value`.
 *
 * # Safety
 * `buf` must be valid for `len` bytes; `written` and `value` may be null.
 */
enum SlStatus sl_lambda_exact(uint32_t n, char *buf, size_t len, size_t *written, double *value);

/**
 * λ(Cₙ) by compensated summation.
 *
 * # Safety
 * `value` must be a valid pointer.
 */
enum SlStatus sl_lambda_compensated(uint32_t n, double *value);

/**
 * λ(Eₙᵉ).
 *
 * # Safety
 * `value` must be a valid pointer.
 */
enum SlStatus sl_e_set_measure(uint32_t n, double eps, double *value);

/**
 * Partition-function estimate `(1/n) log Σ diam(I)^t` over a family.
 *
 * # Safety
 * `value` must be a valid pointer.
 */
enum SlStatus sl_pressure_estimate(uint32_t n, double t, enum SlFamilyKind family, double *value);

/**
 * Enumerates a family of level `n`.
 *
 * # Safety
 * `family` must be a valid pointer; on success it receives a handle owned by
 * the caller.
 */
enum SlStatus sl_family_new(uint32_t n, enum SlFamilyKind kind, struct SlFamily **family);

/**
 * Number of intervals in a family.
 *
 * # Safety
 * `family` must be a live handle and `count` a valid pointer.
 */
enum SlStatus sl_family_len(const struct SlFamily *family, size_t *count);

/**
 * The `index`-th interval (0-based, increasing order).
 *
 * # Safety
 * `family` must be a live handle and `interval` a valid pointer.
 */
enum SlStatus sl_family_get(const struct SlFamily *family,
                            size_t index,
                            struct SlInterval *interval);

/**
 * Total length of a family as `"p/q"`.
 *
 * # Safety
 * `family` must be a live handle and `buf` valid for `len` bytes.
 */
enum SlStatus sl_family_measure(const struct SlFamily *family,
                                char *buf,
                                size_t len,
                                size_t *written);

/**
 * Releases a family. Null is ignored.
 *
 * # Safety
 * `family` must come from [`sl_family_new`] and not be used afterwards.
 */
void sl_family_free(struct SlFamily *family);

/**
 * Creates an operator positioned at level 1. `grid` is ignored by the
 * induced engine.
 *
 * # Safety
 * `op` must be a valid pointer; on success it receives an owned handle.
 */
enum SlStatus sl_operator_new(enum SlEngine engine, size_t grid, struct SlOperator **op);

/**
 * Advances to level `n` and reports λ(Cₙ). Levels below the current one
 * are rejected.
 *
 * # Safety
 * `op` must be a live handle and `value` a valid pointer.
 */
enum SlStatus sl_operator_lambda(struct SlOperator *op, uint64_t n, double *value);

/**
 * Releases an operator. Null is ignored.
 *
 * # Safety
 * `op` must come from [`sl_operator_new`] and not be used afterwards.
 */
void sl_operator_free(struct SlOperator *op);

/**
 * Exact `λ{x : θₙ(x) > 0, a_{θₙ+1}(x) / Σ_{k≤θₙ} a_k(x) > ε}`.
 *
 * # Safety
 * `value` must be a valid pointer.
 */
enum SlStatus sl_theta_tail(uint32_t n, double eps, double *value);

/**
 * Parses a NUL-terminated code and reports its interval.
 * Accepts Farey (`L`/`R`) and Stern–Brocot (`A`/`B`) words.
 *
 * # Safety
 * `code` must be a valid C string and `interval` a valid pointer.
 */
enum SlStatus sl_code_interval(const char *code, struct SlInterval *interval);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUMLEVEL_H */
