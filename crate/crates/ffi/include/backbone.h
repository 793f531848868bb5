/* C ABI for the distance-backbone toolkit. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum BbStatus {
  BB_STATUS_OK = 0,
  BB_STATUS_NULL_ARGUMENT = 1,
  BB_STATUS_INVALID_UTF8 = 2,
  BB_STATUS_INVALID_ARGUMENT = 3,
  BB_STATUS_PARSE_ERROR = 4,
  BB_STATUS_IO_ERROR = 5,
  BB_STATUS_RESOURCE_LIMIT = 6,
  BB_STATUS_INVARIANT_VIOLATION = 7,
} BbStatus;

/**
 * Interpretation of input edge weights.
 */
typedef enum BbWeightKind {
  /**
   * Weights are distances in `[0, inf)`.
   */
  BB_WEIGHT_KIND_DISTANCE = 0,
  /**
   * Weights are proximities in `(0, 1]`, converted via `d = 1/p - 1`.
   */
  BB_WEIGHT_KIND_PROXIMITY = 1,
} BbWeightKind;

/**
 * Opaque backbone handle; keeps a copy of its parent graph so exports
 * and label lookups need no second handle.
 */
typedef struct BbBackbone BbBackbone;

/**
 * Opaque distance-graph handle.
 */
typedef struct BbGraph BbGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *bb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bb_version(void);

/**
 * Reads a delimited edge list (`source target weight` per line, `#`
 * comments) into a new graph handle.
 *
 * `delimiter` is a single byte, or 0 to split on any whitespace.
 * On success writes the handle to `out`.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. The returned handle must be released with [`bb_graph_free`].
 */
enum BbStatus bb_graph_read_edge_list(const char *path,
                                      enum BbWeightKind weight_kind,
                                      char delimiter,
                                      struct BbGraph **out);

/**
 * Loads a bundled dataset (largest connected component, normalized
 * distances). `cache_dir` may be NULL to use the default search path.
 *
 * # Safety
 * `name` must be a valid NUL-terminated string; `cache_dir` NULL or
 * valid; `out` must be a valid pointer.
 */
enum BbStatus bb_graph_load_dataset(const char *name, const char *cache_dir, struct BbGraph **out);

/**
 * Releases a graph handle. NULL is ignored.
 *
 * # Safety
 * `g` must be NULL or a pointer returned by a `bb_graph_*` constructor,
 * not yet freed.
 */
void bb_graph_free(struct BbGraph *g);

/**
 * # Safety
 * `g` must be a valid graph handle.
 */
uint64_t bb_graph_node_count(const struct BbGraph *g);

/**
 * # Safety
 * `g` must be a valid graph handle.
 */
uint64_t bb_graph_edge_count(const struct BbGraph *g);

/**
 * Edge density `m / (n(n-1)/2)`; needs at least two nodes.
 *
 * # Safety
 * `g` must be a valid graph handle and `out` a valid pointer.
 */
enum BbStatus bb_graph_density(const struct BbGraph *g, double *out);

/**
 * 1 when the graph is connected, 0 otherwise.
 *
 * # Safety
 * `g` must be a valid graph handle.
 */
int32_t bb_graph_is_connected(const struct BbGraph *g);

/**
 * Extracts the largest connected component into a new handle.
 *
 * # Safety
 * `g` must be a valid graph handle and `out` a valid pointer.
 */
enum BbStatus bb_graph_largest_component(const struct BbGraph *g, struct BbGraph **out);

/**
 * Mean shortest-path length under the given operator id (e.g. "sum",
 * "max", "minkowski(r=2)"), ignoring unreachable pairs.
 *
 * # Safety
 * `g` must be a valid graph handle; `operator` a valid NUL-terminated
 * string; `out` a valid pointer.
 */
enum BbStatus bb_graph_mean_closure_length(const struct BbGraph *g,
                                           const char *operator_,
                                           double *out);

/**
 * Computes the distance backbone of `g` under the given operator id.
 * `tol` is the relative classification tolerance; pass a negative value
 * for the default.
 *
 * # Safety
 * `g` must be a valid graph handle; `operator` a valid NUL-terminated
 * string; `out` a valid pointer. The returned handle must be released
 * with [`bb_backbone_free`].
 */
enum BbStatus bb_backbone_extract(const struct BbGraph *g,
                                  const char *operator_,
                                  double tol,
                                  struct BbBackbone **out);

/**
 * Releases a backbone handle. NULL is ignored.
 *
 * # Safety
 * `b` must be NULL or a pointer returned by [`bb_backbone_extract`],
 * not yet freed.
 */
void bb_backbone_free(struct BbBackbone *b);

/**
 * # Safety
 * `b` must be a valid backbone handle.
 */
uint64_t bb_backbone_kept_count(const struct BbBackbone *b);

/**
 * # Safety
 * `b` must be a valid backbone handle.
 */
uint64_t bb_backbone_removed_count(const struct BbBackbone *b);

/**
 * Fraction of triangular (kept) edges.
 *
 * # Safety
 * `b` must be a valid backbone handle and `out` a valid pointer.
 */
enum BbStatus bb_backbone_tau(const struct BbBackbone *b, double *out);

/**
 * Edge redundancy, exactly `1 - tau`.
 *
 * # Safety
 * `b` must be a valid backbone handle and `out` a valid pointer.
 */
enum BbStatus bb_backbone_sigma(const struct BbBackbone *b, double *out);

/**
 * Distortion of the edge joining two node labels: 1 for kept edges,
 * `direct/closure` for removed ones.
 *
 * # Safety
 * `b` must be a valid backbone handle; `u_label`/`v_label` valid
 * NUL-terminated strings; `out` a valid pointer.
 */
enum BbStatus bb_backbone_distortion(const struct BbBackbone *b,
                                     const char *u_label,
                                     const char *v_label,
                                     double *out);

/**
 * Writes the backbone TSV (canonical edge order, labels, distances,
 * closure values, distortions, classes).
 *
 * # Safety
 * `b` must be a valid backbone handle and `path` a valid NUL-terminated
 * string.
 */
enum BbStatus bb_backbone_write_tsv(const struct BbBackbone *b, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
