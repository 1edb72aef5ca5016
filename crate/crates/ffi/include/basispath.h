#ifndef BASISPATH_H
#define BASISPATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of fallible calls.
 */
typedef enum BpStatus {
  BP_STATUS_OK = 0,
  BP_STATUS_NULL_ARGUMENT = 1,
  BP_STATUS_INVALID_UTF8 = 2,
  BP_STATUS_INVALID_GRAPH = 3,
  BP_STATUS_UNKNOWN_STRATEGY = 4,
  BP_STATUS_MODEL_ERROR = 5,
  BP_STATUS_PANIC = 6,
} BpStatus;

/**
 * A validated control-flow graph.
 */
typedef struct BpCfg BpCfg;

/**
 * The outcome of one generation run.
 */
typedef struct BpReport BpReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty when none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *bp_last_error(void);

/**
 * Parses and validates a graph document.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a writable pointer.
 */
enum BpStatus bp_cfg_from_json(const char *json, struct BpCfg **out);

/**
 * # Safety
 * `cfg` must come from [`bp_cfg_from_json`] and not be used afterwards.
 */
void bp_cfg_free(struct BpCfg *cfg);

/**
 * Cyclomatic complexity, or 0 for a null handle.
 *
 * # Safety
 * `cfg` must be null or a live handle.
 */
size_t bp_cfg_cyclomatic_complexity(const struct BpCfg *cfg);

/**
 * # Safety
 * `cfg` must be null or a live handle.
 */
size_t bp_cfg_edge_count(const struct BpCfg *cfg);

/**
 * Runs a strategy by id (`holistic`, `incr-novelty`, ...). A non-positive
 * `time_limit_s` selects the default budget and `node_limit` 0 means no
 * node budget. A run that finishes without a complete basis still returns
 * [`BpStatus::Ok`]; check [`bp_report_success`].
 *
 * # Safety
 * `cfg` must be a live handle, `strategy` a nul-terminated string and
 * `out` a writable pointer.
 */
enum BpStatus bp_generate(const struct BpCfg *cfg,
                          const char *strategy,
                          double time_limit_s,
                          uint64_t node_limit,
                          struct BpReport **out);

/**
 * # Safety
 * `report` must come from [`bp_generate`] and not be used afterwards.
 */
void bp_report_free(struct BpReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
bool bp_report_success(const struct BpReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t bp_report_path_count(const struct BpReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
size_t bp_report_rank(const struct BpReport *report);

/**
 * Covered and total edge counts.
 *
 * # Safety
 * `report` must be a live handle; `covered` and `total` may be null.
 */
enum BpStatus bp_report_coverage(const struct BpReport *report, size_t *covered, size_t *total);

/**
 * Path set JSON (no timing fields). Release with [`bp_string_free`].
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *bp_report_paths_json(const struct BpReport *report);

/**
 * Full report JSON with per-iteration diagnostics.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
char *bp_report_json(const struct BpReport *report);

/**
 * Writes the holistic model in CPLEX LP format into `*lp` and the matching
 * layout JSON into `*layout`. Either output pointer may be null.
 *
 * # Safety
 * `cfg` must be a live handle; non-null output pointers must be writable.
 */
enum BpStatus bp_export_holistic_lp(const struct BpCfg *cfg,
                                    bool enforce_connectivity,
                                    char **lp,
                                    char **layout);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void bp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BASISPATH_H */
