/* dwlkit C API: continuous-time dynamic graph toolkit. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API call.
 */
typedef enum DwlkitStatus {
  DWLKIT_STATUS_OK = 0,
  DWLKIT_STATUS_NULL_POINTER = 1,
  DWLKIT_STATUS_INVALID_UTF8 = 2,
  DWLKIT_STATUS_INVALID_ARGUMENT = 3,
  DWLKIT_STATUS_PARSE_ERROR = 4,
  DWLKIT_STATUS_IO_ERROR = 5,
  DWLKIT_STATUS_SIZE_BOUND = 6,
  DWLKIT_STATUS_INTERNAL = 7,
} DwlkitStatus;

/**
 * Opaque graph handle: an immutable event stream plus its pair timelines.
 */
typedef struct DwlkitGraph DwlkitGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the message of the most recent error on this thread, or NULL if
 * none occurred. The caller owns the string.
 */
char *dwlkit_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a dwlkit function and not
 * yet freed; NULL is accepted and ignored.
 */
void dwlkit_string_free(char *s);

/**
 * Loads an event stream from a file. `format` is "edge_list" or
 * "jodie_csv". On success writes a new handle to `out`.
 *
 * # Safety
 * `path` and `format` must be NUL-terminated strings; `out` must be a valid
 * pointer to a handle slot.
 */
enum DwlkitStatus dwlkit_graph_load(const char *path, const char *format, struct DwlkitGraph **out);

/**
 * Parses an edge-list event stream held in memory.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid.
 */
enum DwlkitStatus dwlkit_graph_parse_edge_list(const char *text, struct DwlkitGraph **out);

/**
 * Releases a graph handle.
 *
 * # Safety
 * `g` must come from a dwlkit load function and not be freed twice; NULL is
 * ignored.
 */
void dwlkit_graph_free(struct DwlkitGraph *g);

/**
 * Number of nodes of the graph.
 *
 * # Safety
 * `g` must be a live handle; `out` must be valid.
 */
enum DwlkitStatus dwlkit_graph_node_count(const struct DwlkitGraph *g, uint64_t *out);

/**
 * Number of events of the graph.
 *
 * # Safety
 * `g` must be a live handle; `out` must be valid.
 */
enum DwlkitStatus dwlkit_graph_event_count(const struct DwlkitGraph *g, uint64_t *out);

/**
 * Runs the order-`k` dynamic WL distinguishing test on two graphs at time
 * `t` and writes the verdict as a JSON string.
 *
 * # Safety
 * Both handles must be live; `out_json` must be valid.
 */
enum DwlkitStatus dwlkit_dwl_distinguish(const struct DwlkitGraph *ga,
                                         const struct DwlkitGraph *gb,
                                         double t,
                                         uint32_t k,
                                         uint32_t max_rounds,
                                         char **out_json);

/**
 * Multi-interacted time encoding of node `w` w.r.t. the pair (`u`, `v`) at
 * time `t`: writes `2 * k` values into `out`, which must hold at least
 * `2 * k` doubles.
 *
 * # Safety
 * `g` must be a live handle; `out` must point at `out_len` writable
 * doubles.
 */
enum DwlkitStatus dwlkit_mite(const struct DwlkitGraph *g,
                              uint64_t u,
                              uint64_t v,
                              uint64_t w,
                              double t,
                              uint64_t k,
                              double *out,
                              uint64_t out_len);

/**
 * Average precision of a scored, 0/1-labeled sample.
 *
 * # Safety
 * `scores` and `labels` must point at `len` readable doubles; `out` must be
 * valid.
 */
enum DwlkitStatus dwlkit_average_precision(const double *scores,
                                           const double *labels,
                                           uint64_t len,
                                           double *out);

/**
 * ROC AUC of a scored, 0/1-labeled sample.
 *
 * # Safety
 * `scores` and `labels` must point at `len` readable doubles; `out` must be
 * valid.
 */
enum DwlkitStatus dwlkit_roc_auc(const double *scores,
                                 const double *labels,
                                 uint64_t len,
                                 double *out);

/**
 * Runs the expressiveness property suite and writes the report as JSON.
 *
 * # Safety
 * `out_json` must be valid.
 */
enum DwlkitStatus dwlkit_suite(uint64_t trials, uint64_t seed, uint64_t searches, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
