/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef RTPROF_H
#define RTPROF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  RT_STATUS_OK = 0,
  RT_STATUS_NULL_POINTER = 1,
  RT_STATUS_INVALID_INPUT = 2,
  RT_STATUS_BUDGET = 3,
  RT_STATUS_DISCONNECTED = 4,
  RT_STATUS_IO = 5,
  RT_STATUS_PANIC = 6,
} RtStatus;

/**
 * Congestion lower-bound certificate.
 */
typedef struct RtCertificate RtCertificate;

/**
 * Undirected simple graph.
 */
typedef struct RtGraph RtGraph;

/**
 * Witness subgraph Y_k together with its graph.
 */
typedef struct RtYk RtYk;

/**
 * Resource limits; pass `NULL` wherever accepted to use the defaults.
 */
typedef struct {
  uint64_t vertices;
  uint64_t work;
} RtBudget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or `NULL`. Valid until
 * the next `rtprof_*` call on the same thread.
 */
const char *rtprof_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rtprof_version(void);

/**
 * # Safety
 * `s` must be `NULL` or a string returned by this library.
 */
void rtprof_string_free(char *s);

/**
 * Graph on `n` vertices from `edge_count` pairs stored flat in `edges`.
 *
 * # Safety
 * `edges` must point to `2 * edge_count` values (or be `NULL` when
 * `edge_count` is 0); `out` must be writable.
 */
RtStatus rtprof_graph_new(size_t n, const size_t *edges, size_t edge_count, RtGraph **out);

/**
 * Graph from the JSON graph format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
RtStatus rtprof_graph_from_json(const char *json, RtGraph **out);

/**
 * # Safety
 * `g` must be `NULL` or a handle from this library, not yet freed.
 */
void rtprof_graph_free(RtGraph *g);

/**
 * Vertex count, or 0 for `NULL`.
 *
 * # Safety
 * `g` must be `NULL` or a live handle.
 */
size_t rtprof_graph_vertex_count(const RtGraph *g);

/**
 * Edge count, or 0 for `NULL`.
 *
 * # Safety
 * `g` must be `NULL` or a live handle.
 */
size_t rtprof_graph_edge_count(const RtGraph *g);

/**
 * Canonical JSON encoding; free with [`rtprof_string_free`].
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
RtStatus rtprof_graph_to_json(const RtGraph *g, char **out);

/**
 * Round tree RT^{H,V} truncated at `depth`.
 *
 * # Safety
 * `budget` must be `NULL` or valid; `out` must be writable.
 */
RtStatus rtprof_round_tree_build(size_t h,
                                 size_t v,
                                 size_t depth,
                                 const RtBudget *budget,
                                 RtGraph **out);

/**
 * Half-plane RT^{H,1} truncated at `depth`.
 *
 * # Safety
 * `budget` must be `NULL` or valid; `out` must be writable.
 */
RtStatus rtprof_half_plane_build(size_t h, size_t depth, const RtBudget *budget, RtGraph **out);

/**
 * Witness subgraph Y_k of RT^{H,V} sized for exponent `p`.
 *
 * # Safety
 * `budget` must be `NULL` or valid; `out` must be writable.
 */
RtStatus rtprof_yk_build(size_t h,
                         size_t v,
                         double p,
                         size_t k,
                         const RtBudget *budget,
                         RtYk **out);

/**
 * # Safety
 * `yk` must be `NULL` or a handle from this library, not yet freed.
 */
void rtprof_yk_free(RtYk *yk);

/**
 * Independent copy of the graph underlying `yk`.
 *
 * # Safety
 * `yk` must be a live handle; `out` must be writable.
 */
RtStatus rtprof_yk_graph(const RtYk *yk, RtGraph **out);

/**
 * Base length T of Y_k, or 0 for `NULL`.
 *
 * # Safety
 * `yk` must be `NULL` or a live handle.
 */
size_t rtprof_yk_base_length(const RtYk *yk);

/**
 * Exact h^2 from the spectral gap.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
RtStatus rtprof_h2(const RtGraph *g, double *out);

/**
 * Two-valued upper bound on h^1; exact on small graphs.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
RtStatus rtprof_h1(const RtGraph *g, double *out);

/**
 * Numeric upper bound on h^p from `restarts` seeded descents.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
RtStatus rtprof_hp(const RtGraph *g, double p, size_t restarts, uint64_t seed, double *out);

/**
 * Congestion certificate for breadth-first routing on a connected graph.
 *
 * # Safety
 * `g` must be a live handle; `budget` `NULL` or valid; `out` writable.
 */
RtStatus rtprof_certify_bfs(const RtGraph *g,
                            double p,
                            const RtBudget *budget,
                            RtCertificate **out);

/**
 * Congestion certificate for the canonical routing of Y_k.
 *
 * # Safety
 * `yk` must be a live handle; `budget` `NULL` or valid; `out` writable.
 */
RtStatus rtprof_certify_yk(const RtYk *yk, double p, const RtBudget *budget, RtCertificate **out);

/**
 * # Safety
 * `c` must be `NULL` or a handle from this library, not yet freed.
 */
void rtprof_certificate_free(RtCertificate *c);

/**
 * Lower bound on h^p, or NaN for `NULL`.
 *
 * # Safety
 * `c` must be `NULL` or a live handle.
 */
double rtprof_certificate_bound(const RtCertificate *c);

/**
 * Largest edge load, or 0 for `NULL`.
 *
 * # Safety
 * `c` must be `NULL` or a live handle.
 */
uint64_t rtprof_certificate_max_edge_load(const RtCertificate *c);

/**
 * Certificate JSON record; free with [`rtprof_string_free`].
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
RtStatus rtprof_certificate_to_json(const RtCertificate *c, char **out);

/**
 * Size of an ε-cut with ε = `num/den`. Exact up to the exact-search limit,
 * heuristic above it; `optimal` (if non-`NULL`) reports which.
 *
 * # Safety
 * `g` must be a live handle; `size` writable; `optimal` `NULL` or writable.
 */
RtStatus rtprof_cut_size(const RtGraph *g, uint64_t num, uint64_t den, size_t *size, bool *optimal);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RTPROF_H */
