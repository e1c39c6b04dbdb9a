#ifndef BMCM_H
#define BMCM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum BmcmStatus {
  BMCM_STATUS_OK = 0,
  BMCM_STATUS_NULL_POINTER = 1,
  BMCM_STATUS_INVALID_UTF8 = 2,
  /**
   * Template text could not be parsed.
   */
  BMCM_STATUS_SYNTAX = 3,
  /**
   * Template or assignment does not fit the data.
   */
  BMCM_STATUS_INVALID_MODEL = 4,
  /**
   * CSV content or dataset size is invalid.
   */
  BMCM_STATUS_INVALID_DATA = 5,
  /**
   * A numeric argument is out of range.
   */
  BMCM_STATUS_INVALID_ARGUMENT = 6,
  /**
   * Too many slots for exhaustive enumeration.
   */
  BMCM_STATUS_CAPACITY = 7,
  /**
   * A test is undefined for the given counts.
   */
  BMCM_STATUS_DEGENERATE = 8,
  /**
   * The null-data gate is inapplicable or failed.
   */
  BMCM_STATUS_GATE = 9,
  BMCM_STATUS_IO = 10,
  BMCM_STATUS_PANIC = 99,
} BmcmStatus;

/**
 * Opaque binary dataset.
 */
typedef struct BmcmDataset BmcmDataset;

/**
 * Opaque analysis report.
 */
typedef struct BmcmReport BmcmReport;

/**
 * Opaque parsed model template.
 */
typedef struct BmcmTemplate BmcmTemplate;

/**
 * Analysis settings. Obtain defaults from [`bmcm_config_default`].
 */
typedef struct BmcmConfig {
  /**
   * Sample assignments instead of enumerating all of them.
   */
  bool sampled;
  /**
   * Trials per row when `sampled` is set.
   */
  uint64_t trials_per_row;
  uint64_t seed;
  double alpha;
  bool include_null_in_step2;
  bool ignore_gate;
} BmcmConfig;

/**
 * Mirror of a test result.
 */
typedef struct BmcmTestResult {
  double statistic;
  double p_value;
  double log10_p_value;
  uint32_t dof;
} BmcmTestResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The caller owns
 * the returned string.
 */
char *bmcm_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void bmcm_string_free(char *s);

struct BmcmConfig bmcm_config_default(void);

/**
 * Load a CSV file.
 *
 * # Safety
 * `path` and `outcome` must be NUL-terminated strings; `out` must be
 * writable.
 */
enum BmcmStatus bmcm_dataset_from_csv_path(const char *path,
                                           const char *outcome,
                                           struct BmcmDataset **out);

/**
 * Parse CSV content held in memory.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `outcome` must be a
 * NUL-terminated string; `out` must be writable.
 */
enum BmcmStatus bmcm_dataset_from_csv_bytes(const uint8_t *data,
                                            size_t len,
                                            const char *outcome,
                                            struct BmcmDataset **out);

/**
 * Independent fair-coin cohort with columns x1, x2, x3, xO.
 *
 * # Safety
 * `out` must be writable.
 */
enum BmcmStatus bmcm_dataset_generate_random(size_t n, uint64_t seed, struct BmcmDataset **out);

/**
 * Cohort with xO = x1 (exactly n/2 ones); `n` must be even.
 *
 * # Safety
 * `out` must be writable.
 */
enum BmcmStatus bmcm_dataset_generate_dependent(size_t n, uint64_t seed, struct BmcmDataset **out);

/**
 * Row count, or 0 for NULL.
 *
 * # Safety
 * `dataset` must be NULL or a live dataset handle.
 */
size_t bmcm_dataset_rows(const struct BmcmDataset *dataset);

/**
 * Serialize as CSV; the caller owns the returned string. NULL on failure.
 *
 * # Safety
 * `dataset` must be NULL or a live dataset handle.
 */
char *bmcm_dataset_to_csv(const struct BmcmDataset *dataset);

/**
 * # Safety
 * `dataset` must be NULL or a handle from this library, not yet freed.
 */
void bmcm_dataset_free(struct BmcmDataset *dataset);

/**
 * Parse template text such as `"x1 ? x2 ? x3 = xO"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum BmcmStatus bmcm_template_parse(const char *text, struct BmcmTemplate **out);

/**
 * # Safety
 * `template` must be NULL or a live template handle.
 */
size_t bmcm_template_slot_count(const struct BmcmTemplate *template_);

/**
 * Canonical text; the caller owns the returned string.
 *
 * # Safety
 * `template` must be NULL or a live template handle.
 */
char *bmcm_template_to_string(const struct BmcmTemplate *template_);

/**
 * Evaluate on one dataset row. `ops[i]` fills slot `i + 1`: 0 = and,
 * 1 = or.
 *
 * # Safety
 * `template` and `dataset` must be live handles; `ops` must point to
 * `n_ops` readable bytes (may be NULL when `n_ops` is 0); `out` must be
 * writable.
 */
enum BmcmStatus bmcm_template_evaluate(const struct BmcmTemplate *template_,
                                       const struct BmcmDataset *dataset,
                                       size_t row,
                                       const uint8_t *ops,
                                       size_t n_ops,
                                       bool *out);

/**
 * # Safety
 * `template` must be NULL or a handle from this library, not yet freed.
 */
void bmcm_template_free(struct BmcmTemplate *template_);

/**
 * Binomial chi-square of `H0: p = 1/2` on two counts.
 *
 * # Safety
 * `out` must be writable.
 */
enum BmcmStatus bmcm_binomial_chisq(uint64_t count_and,
                                    uint64_t count_or,
                                    struct BmcmTestResult *out);

/**
 * 2x2 chi-square; `corrected` applies the continuity correction.
 *
 * # Safety
 * `out` must be writable.
 */
enum BmcmStatus bmcm_contingency_chisq(uint64_t a,
                                       uint64_t b,
                                       uint64_t c,
                                       uint64_t d,
                                       bool corrected,
                                       struct BmcmTestResult *out);

/**
 * Two-sided Fisher exact test.
 *
 * # Safety
 * `out` must be writable.
 */
enum BmcmStatus bmcm_fisher_exact(uint64_t a,
                                  uint64_t b,
                                  uint64_t c,
                                  uint64_t d,
                                  struct BmcmTestResult *out);

/**
 * Chi-square(1) survival function.
 *
 * # Safety
 * `out` must be writable.
 */
enum BmcmStatus bmcm_chi2_sf(double x, double *out);

/**
 * Run all three steps. `templates` holds `n_templates` template handles.
 * A failed gate is not an error: inspect [`bmcm_report_halted`].
 *
 * # Safety
 * `dataset` must be a live handle, `templates` must point to
 * `n_templates` live template handles, `config` may be NULL for defaults,
 * and `out` must be writable.
 */
enum BmcmStatus bmcm_analyze(const struct BmcmDataset *dataset,
                             const struct BmcmTemplate *const *templates,
                             size_t n_templates,
                             const struct BmcmConfig *config,
                             struct BmcmReport **out);

/**
 * # Safety
 * `report` must be NULL or a live report handle.
 */
bool bmcm_report_gate_passed(const struct BmcmReport *report);

/**
 * True when steps 2 and 3 were skipped because the gate failed.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
bool bmcm_report_halted(const struct BmcmReport *report);

/**
 * # Safety
 * `report` must be NULL or a live report handle.
 */
size_t bmcm_report_model_count(const struct BmcmReport *report);

/**
 * Write model `index`'s resolved operators (0 = and, 1 = or) to `ops`.
 * `*resolved` is false when the model has no resolved assignment, and
 * `ops` is left untouched.
 *
 * # Safety
 * `report` must be a live handle; `ops` must have room for `capacity`
 * bytes; `resolved` must be writable.
 */
enum BmcmStatus bmcm_report_resolved(const struct BmcmReport *report,
                                     size_t index,
                                     uint8_t *ops,
                                     size_t capacity,
                                     bool *resolved);

/**
 * Step-3 table of model `index` as `a, b, c, d`; fails when the model has
 * no final table.
 *
 * # Safety
 * `report` must be a live handle; `cells` must have room for 4 values.
 */
enum BmcmStatus bmcm_report_final_table(const struct BmcmReport *report,
                                        size_t index,
                                        uint64_t *cells);

/**
 * JSON report; the caller owns the returned string.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
char *bmcm_report_to_json(const struct BmcmReport *report);

/**
 * Plain-text report; the caller owns the returned string.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
char *bmcm_report_to_text(const struct BmcmReport *report);

/**
 * # Safety
 * `report` must be NULL or a handle from this library, not yet freed.
 */
void bmcm_report_free(struct BmcmReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BMCM_H */
