#ifndef ANISO_WF_H
#define ANISO_WF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AWF_OK 0

#define AWF_ERR_NULL_POINTER 1

#define AWF_ERR_INVALID_ARGUMENT 2

#define AWF_ERR_CONFIG 3

#define AWF_ERR_NUMERIC 4

#define AWF_ERR_NOT_POINTWISE 5

#define AWF_ERR_BUFFER_TOO_SMALL 6

#define AWF_ERR_OUT_OF_RANGE 7

#define AWF_ERR_PANIC 99

#define AWF_LABEL_OUT 0

#define AWF_LABEL_IN 1

#define AWF_LABEL_OUT_FLOOR 2

#define AWF_LABEL_INCONCLUSIVE 3

/**
 * A classified direction sweep.
 */
typedef struct AwfMap AwfMap;

/**
 * A parsed run description together with its STFT evaluator.
 */
typedef struct AwfRun AwfRun;

typedef struct AwfStftValue {
  double re;
  double im;
  /**
   * ln|V|, finite where |V| itself underflows.
   */
  double log_abs;
  double abs_error;
  /**
   * Nonzero when the value is indistinguishable from noise.
   */
  uint8_t below_floor;
} AwfStftValue;

typedef struct AwfVerdict {
  /**
   * One of `AWF_LABEL_*`.
   */
  int32_t label;
  double terminal_rate;
} AwfVerdict;

typedef struct AwfMapEntry {
  double x0;
  double xi0;
  struct AwfVerdict verdict;
} AwfMapEntry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message, without the terminating NUL.
 */
size_t awf_last_error_length(void);

/**
 * Copies the last error message into `buf` as a NUL-terminated string.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
int32_t awf_last_error(char *buf, size_t len);

/**
 * Parses a `section.key = value` run description.
 *
 * # Safety
 * `config` must be a NUL-terminated string; `out_run` must be writable.
 */
int32_t awf_run_from_config(const char *config, struct AwfRun **out_run);

/**
 * # Safety
 * `run` must come from `awf_run_from_config` and not be freed twice. Null is ignored.
 */
void awf_run_free(struct AwfRun *run);

/**
 * V_φ f(x, ξ) with the run's signal, window and backend.
 *
 * # Safety
 * `run` must be a live handle; `out_value` must be writable.
 */
int32_t awf_stft(const struct AwfRun *run, double x, double xi, struct AwfStftValue *out_value);

/**
 * Classifies the direction with parameters (w, σx, σξ) under the run's policy.
 *
 * # Safety
 * `run` must be a live handle; `out_verdict` must be writable.
 */
int32_t awf_classify_direction(const struct AwfRun *run,
                               double w,
                               double sigma_x,
                               double sigma_xi,
                               struct AwfVerdict *out_verdict);

/**
 * Classifies the run's direction sweep.
 *
 * # Safety
 * `run` must be a live handle; `out_map` must be writable.
 */
int32_t awf_wavefront_map(const struct AwfRun *run, struct AwfMap **out_map);

/**
 * Number of directions in the map; 0 for a null handle.
 *
 * # Safety
 * `map` must be null or a live handle.
 */
size_t awf_map_len(const struct AwfMap *map);

/**
 * # Safety
 * `map` must be a live handle; `out_entry` must be writable.
 */
int32_t awf_map_entry(const struct AwfMap *map, size_t i, struct AwfMapEntry *out_entry);

/**
 * # Safety
 * `map` must come from `awf_wavefront_map` and not be freed twice. Null is ignored.
 */
void awf_map_free(struct AwfMap *map);

/**
 * Splits (x, ξ) into a quasi-sphere direction and a scale λ for the index (t, s).
 *
 * # Safety
 * The three output pointers must be writable.
 */
int32_t awf_decompose(double t,
                      double s,
                      double x,
                      double xi,
                      double *out_x0,
                      double *out_xi0,
                      double *out_lambda);

/**
 * Runs a named experiment; `out_passed` is set to 1 when every expectation holds.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out_passed` must be writable.
 */
int32_t awf_run_preset(const char *name, uint8_t *out_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANISO_WF_H */
