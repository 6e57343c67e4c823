#ifndef PCO_H
#define PCO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define PCO_OK 0

#define PCO_ERR_NULL 1

#define PCO_ERR_INVALID_ARGUMENT 2

#define PCO_ERR_TOPOLOGY 3

#define PCO_ERR_SYNC 4

#define PCO_ERR_SCHED 5

#define PCO_ERR_SPECTRAL 6

#define PCO_ERR_BUFFER_TOO_SMALL 7

#define PCO_ERR_PANIC 8

// Opaque network handle.
typedef struct PcoTopology PcoTopology;

typedef struct PcoSyncResult {
  bool converged;
  double time;
  double periods;
  double delta_max;
  // Head node id, or -1 when the final state has none.
  int64_t head;
} PcoSyncResult;

// Exact rational `num / den` with `den > 0`.
typedef struct PcoRatio {
  int64_t num;
  int64_t den;
} PcoRatio;

typedef struct PcoSchedResult {
  bool converged;
  uint64_t frames;
  bool order_preserved;
  double max_sum_error;
} PcoSchedResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the message of the last failed call on this thread into `buf`
// (NUL-terminated, truncated to `len`). Returns the full message length
// excluding the terminator, so a return value `>= len` means truncation.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t pco_last_error(char *buf, size_t len);

// Builds a network from `edge_count` undirected edges `(src[k], dst[k])`
// with delays `tau[k]`; `tau` may be null for zero delays.
//
// # Safety
// `src` and `dst` must hold `edge_count` entries, `tau` likewise unless
// null, and `out` must be writable.
int32_t pco_topology_new(size_t node_count,
                         const size_t *src,
                         const size_t *dst,
                         const double *tau,
                         size_t edge_count,
                         struct PcoTopology **out);

// Releases a handle from [`pco_topology_new`]. Null is ignored.
//
// # Safety
// `topo` must be null or a live handle not used afterwards.
void pco_topology_free(struct PcoTopology *topo);

// # Safety
// `topo` must be a live handle and `out` writable.
int32_t pco_topology_node_count(const struct PcoTopology *topo, size_t *out);

// Number of maximal cliques.
//
// # Safety
// `topo` must be a live handle and `out` writable.
int32_t pco_topology_clique_count(const struct PcoTopology *topo, size_t *out);

// Shortest-path delay between two nodes.
//
// # Safety
// `topo` must be a live handle and `out` writable.
int32_t pco_topology_path_delay(const struct PcoTopology *topo, size_t i, size_t j, double *out);

// Runs synchronization until a fixed point or `max_periods`.
//
// Initial phases come from `phases` (length = node count) when non-null,
// otherwise from `seed`. A NaN `rho` selects the default refractory
// period. When `final_phases` is non-null it receives the end state and
// must hold `len` entries, at least the node count.
//
// # Safety
// Pointers must be null or valid for the lengths described above; `out`
// must be writable.
int32_t pco_sync_run(const struct PcoTopology *topo,
                     double alpha,
                     double rho,
                     double max_periods,
                     uint64_t seed,
                     const double *phases,
                     struct PcoSyncResult *out,
                     double *final_phases,
                     size_t len);

// Runs the scheduling protocol from a seeded collision-free random start
// until the timers settle or `max_frames` elapse. `demands` holds one
// ratio per node. When `gamma` is non-null it receives the final slot
// width of every node and must hold `len` entries, at least the node
// count.
//
// # Safety
// Pointers must be null or valid for the lengths described above; `out`
// must be writable.
int32_t pco_sched_run(const struct PcoTopology *topo,
                      double beta,
                      struct PcoRatio delta,
                      const struct PcoRatio *demands,
                      uint64_t max_frames,
                      uint64_t seed,
                      struct PcoSchedResult *out,
                      double *gamma,
                      size_t len);

// Second-largest eigenvalue modulus of the per-frame map of one clique of
// `n` nodes with equal demand `d`.
//
// # Safety
// `out` must be writable.
int32_t pco_lambda2_exact(size_t n, double beta, double d, double delta, double *out);

// Closed-form estimate of [`pco_lambda2_exact`].
//
// # Safety
// `out` must be writable.
int32_t pco_lambda2_approx(size_t n, double beta, double d, double delta, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCO_H */
