#ifndef ENTNET_H
#define ENTNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EntnetStatus {
  ENTNET_STATUS_OK = 0,
  ENTNET_STATUS_NULL_POINTER = 1,
  ENTNET_STATUS_INVALID_UTF8 = 2,
  ENTNET_STATUS_PARSE = 3,
  ENTNET_STATUS_INVALID_ARGUMENT = 4,
  ENTNET_STATUS_BUFFER_TOO_SMALL = 5,
  ENTNET_STATUS_MISSING_PREREQUISITE = 6,
  ENTNET_STATUS_CONFIG = 7,
  ENTNET_STATUS_IO = 8,
  ENTNET_STATUS_PANIC = 9,
} EntnetStatus;

/**
 * A co-occurrence graph loaded from GEXF, with its stored communities,
 * betweenness scores and positions.
 */
typedef struct EntnetGraph EntnetGraph;

/**
 * A temporal stream model loaded from Sankey JSON.
 */
typedef struct EntnetStreams EntnetStreams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *entnet_version(void);

/**
 * Message for the last failed call on this thread, or NULL after a
 * success. Valid until the next call into the library on this thread.
 */
const char *entnet_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void entnet_string_free(char *s);

/**
 * Parses a GEXF document produced by the `graph` stage.
 *
 * # Safety
 * `gexf` must be a NUL-terminated string and `out_graph` a valid pointer.
 */
enum EntnetStatus entnet_graph_from_gexf(const char *gexf, struct EntnetGraph **out_graph);

/**
 * # Safety
 * `graph` must be NULL or a handle from [`entnet_graph_from_gexf`] not yet freed.
 */
void entnet_graph_free(struct EntnetGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle; `nodes` and `edges` valid pointers.
 */
enum EntnetStatus entnet_graph_size(const struct EntnetGraph *graph, size_t *nodes, size_t *edges);

/**
 * Recomputes normalized betweenness into `out_scores[0..node_count]`.
 *
 * # Safety
 * `graph` must be a live handle and `out_scores` point to `len` doubles.
 */
enum EntnetStatus entnet_graph_betweenness(const struct EntnetGraph *graph,
                                           double *out_scores,
                                           size_t len);

/**
 * Runs Louvain with `seed`, writing one community id per node and the
 * partition's modularity.
 *
 * # Safety
 * `graph` must be a live handle, `out_communities` point to `len` values
 * and `out_modularity` be NULL or valid.
 */
enum EntnetStatus entnet_graph_louvain(const struct EntnetGraph *graph,
                                       uint64_t seed,
                                       size_t *out_communities,
                                       size_t len,
                                       double *out_modularity);

/**
 * Modularity of an arbitrary assignment of the `len` nodes.
 *
 * # Safety
 * `graph` must be a live handle, `communities` point to `len` values and
 * `out_modularity` be valid.
 */
enum EntnetStatus entnet_graph_modularity(const struct EntnetGraph *graph,
                                          const size_t *communities,
                                          size_t len,
                                          double *out_modularity);

/**
 * Writes the graph back out as GEXF with its stored attributes.
 *
 * # Safety
 * `graph` must be a live handle and `out_gexf` valid; free the result with
 * [`entnet_string_free`].
 */
enum EntnetStatus entnet_graph_to_gexf(const struct EntnetGraph *graph, char **out_gexf);

/**
 * Parses a Sankey JSON document produced by the `temporal` stage.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out_streams` valid.
 */
enum EntnetStatus entnet_streams_from_json(const char *json, struct EntnetStreams **out_streams);

/**
 * # Safety
 * `streams` must be NULL or a handle from [`entnet_streams_from_json`] not yet freed.
 */
void entnet_streams_free(struct EntnetStreams *streams);

/**
 * # Safety
 * `streams` must be a live handle; the out pointers valid.
 */
enum EntnetStatus entnet_streams_size(const struct EntnetStreams *streams,
                                      size_t *periods,
                                      size_t *nodes,
                                      size_t *tubes);

/**
 * Compares the term sets of two stream nodes, given by id (`p<period>:<entity>`).
 * The result is a JSON object with `common`, `only_a` and `only_b` arrays.
 *
 * # Safety
 * `streams` must be a live handle, `a` and `b` NUL-terminated strings and
 * `out_json` valid; free the result with [`entnet_string_free`].
 */
enum EntnetStatus entnet_streams_diff(const struct EntnetStreams *streams,
                                      const char *a,
                                      const char *b,
                                      char **out_json);

/**
 * Clusters the entity mentions of an annotation TSV and returns the cluster
 * dump. `mode` is `"P_MAX"` or `"P_AV"`.
 *
 * # Safety
 * `annotations` and `mode` must be NUL-terminated strings and `out_dump`
 * valid; free the result with [`entnet_string_free`].
 */
enum EntnetStatus entnet_normalize_tsv(const char *annotations, const char *mode, char **out_dump);

/**
 * Runs a pipeline stage (`ingest`, `annotate`, `normalize`, `graph`,
 * `temporal` or `all`) from a TOML config file. A NULL `out_dir` keeps the
 * config's output directory.
 *
 * # Safety
 * `config_path` and `stage` must be NUL-terminated strings; `out_dir` NULL
 * or NUL-terminated.
 */
enum EntnetStatus entnet_run(const char *config_path, const char *stage, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTNET_H */
