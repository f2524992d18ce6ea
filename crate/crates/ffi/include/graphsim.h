#ifndef GRAPHSIM_H
#define GRAPHSIM_H

/* Generated by the graphsim-ffi build script; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
#define GS_OK 0

#define GS_ERR_NULL 1

#define GS_ERR_PARSE 2

#define GS_ERR_INVALID 3

#define GS_ERR_ORDER_MISMATCH 4

#define GS_ERR_BUDGET 5

#define GS_ERR_NO_CONVERGENCE 6

#define GS_ERR_INTERNAL 7

/**
 * Opaque graph handle.
 */
typedef struct GsGraph GsGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a graph from an order and a flat [u0,v0,u1,v1,...] edge array.
 */
int32_t gs_graph_new(uintptr_t n,
                     const uintptr_t *edges,
                     uintptr_t num_edges,
                     struct GsGraph **out);

/**
 * Parses the JSON form {"n": int, "edges": [[u,v],...]}.
 */
int32_t gs_graph_from_json(const char *text, struct GsGraph **out);

void gs_graph_free(struct GsGraph *g);

uintptr_t gs_graph_order(const struct GsGraph *g);

uintptr_t gs_graph_num_edges(const struct GsGraph *g);

/**
 * Alignment metric kinds: 0 entrywise-1, 1 local operator, 2 cut,
 * 3 distortion, 4 isomorphism indicator.
 */
int32_t gs_align_metric(const struct GsGraph *g,
                        const struct GsGraph *h,
                        int32_t kind,
                        double *value,
                        double *normalized);

/**
 * Minimum edge edits to an isomorph of the other graph.
 */
int32_t gs_edit_distance(const struct GsGraph *g, const struct GsGraph *h, double *value);

/**
 * Fractional relaxation over couplings; norm 0 = entrywise-1, 1 = cut.
 * `exact` is set to 1 when the solver certified convergence.
 */
int32_t gs_frac_metric(const struct GsGraph *g,
                       const struct GsGraph *h,
                       int32_t norm,
                       double tol,
                       double *value,
                       int32_t *exact);

/**
 * Transport metric upper bound; kind 0 = entrywise-1, 1 = cut,
 * 2 = distance-matrix (Gromov-Wasserstein style).
 */
int32_t gs_ot_metric(const struct GsGraph *g,
                     const struct GsGraph *h,
                     int32_t kind,
                     uintptr_t restarts,
                     uint64_t seed,
                     double *value);

/**
 * Color-refinement kernel and the induced metric. A negative `level`
 * selects the geometrically weighted kernel; otherwise the truncated
 * kernel up to `level`.
 */
int32_t gs_wl_kernel(const struct GsGraph *g,
                     const struct GsGraph *h,
                     int32_t level,
                     double *kernel,
                     double *metric);

/**
 * Map counts of a pattern in a target; mode 0 = homomorphisms,
 * 1 = embeddings, 2 = strong embeddings.
 */
int32_t gs_hom_count(const struct GsGraph *pattern,
                     const struct GsGraph *target,
                     int32_t mode,
                     int64_t *value);

/**
 * Exact truncated sampling distance with sizes up to `k_max`.
 */
int32_t gs_sampling_distance(const struct GsGraph *g,
                             const struct GsGraph *h,
                             uintptr_t k_max,
                             double *value);

/**
 * Static description of a status code.
 */
const char *gs_status_message(int32_t code);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GRAPHSIM_H */
