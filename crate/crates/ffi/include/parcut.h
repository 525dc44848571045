#ifndef PARCUT_H
#define PARCUT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum ParcutStatus {
  PARCUT_STATUS_OK = 0,
  PARCUT_STATUS_NULL_ARGUMENT = 1,
  PARCUT_STATUS_INVALID_UTF8 = 2,
  PARCUT_STATUS_PARSE_ERROR = 3,
  PARCUT_STATUS_INVALID_ARGUMENT = 4,
  PARCUT_STATUS_RUNTIME_ERROR = 5,
} ParcutStatus;

/**
 * Opaque parsed graph handle.
 */
typedef struct ParcutGraph ParcutGraph;

/**
 * Opaque result handle.
 */
typedef struct ParcutReport ParcutReport;

/**
 * Tunables for a minimum-cut run; initialize with
 * `parcut_options_default` and override fields as needed.
 */
typedef struct ParcutOptions {
  /**
   * RNG seed; identical seeds give identical results.
   */
  uint64_t seed;
  /**
   * Worker threads; 0 auto-detects.
   */
  uintptr_t threads;
  /**
   * Tree-packing accuracy in (0,1).
   */
  double epsilon;
  /**
   * Multiplier on the ceil(ln n) spanning trees tried.
   */
  double tree_multiplier;
  /**
   * Extra restarts with derived seeds.
   */
  uint32_t retries;
  /**
   * Nonzero verifies the result against the Stoer-Wagner oracle.
   */
  uint8_t oracle_check;
} ParcutOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *parcut_last_error(void);

/**
 * Default options: seed 0, auto threads, epsilon 0.2, multiplier 3,
 * no retries, no oracle check.
 */
void parcut_options_default(struct ParcutOptions *out);

/**
 * Parse an edge-list document (one `u v w` edge per line, `#` comments).
 * On success stores a graph handle in `out`; release it with
 * `parcut_graph_free`.
 */
enum ParcutStatus parcut_graph_parse(const char *text, struct ParcutGraph **out);

void parcut_graph_free(struct ParcutGraph *g);

uintptr_t parcut_graph_vertices(const struct ParcutGraph *g);

uintptr_t parcut_graph_edges(const struct ParcutGraph *g);

/**
 * Run the randomized minimum-cut pipeline. On success stores a report
 * handle in `out`; release it with `parcut_report_free`.
 */
enum ParcutStatus parcut_minimum_cut(const struct ParcutGraph *g,
                                     const struct ParcutOptions *options,
                                     struct ParcutReport **out);

/**
 * Exact Stoer-Wagner minimum cut value (sequential oracle).
 */
enum ParcutStatus parcut_stoer_wagner(const struct ParcutGraph *g, int64_t *out_value);

int64_t parcut_report_value(const struct ParcutReport *r);

uint64_t parcut_report_trees_tried(const struct ParcutReport *r);

/**
 * 1 if the oracle check ran and agreed, 0 if it disagreed, -1 if it was
 * not requested.
 */
int32_t parcut_report_oracle_agreement(const struct ParcutReport *r);

uintptr_t parcut_report_side_len(const struct ParcutReport *r);

/**
 * Token of the i-th vertex on the reported side, or null when out of
 * range. Borrowed from the report; valid until `parcut_report_free`.
 */
const char *parcut_report_side_token(const struct ParcutReport *r, uintptr_t i);

void parcut_report_free(struct ParcutReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARCUT_H */
