#ifndef QHT_H
#define QHT_H

/* This file is generated by cbindgen from qht-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Engine selector for [`qht_finite_n_exponent`].
 */
typedef enum QhtEngine {
  QhtEngineAuto = 0,
  QhtEngineDense = 1,
  QhtEngineClassical = 2,
  QhtEnginePinched = 3,
} QhtEngine;

/*
 Result codes for every `qht_*` call.
 */
typedef enum QhtStatus {
  QhtOk = 0,
  /*
   A required pointer argument was null.
   */
  QhtNullPointer = 1,
  /*
   Input failed validation (file, state invariants, parameter ranges).
   */
  QhtInvalidInput = 2,
  /*
   A numerical routine failed (convergence, caps, bisection).
   */
  QhtNumericalFailure = 3,
  /*
   A string argument was not valid UTF-8.
   */
  QhtInvalidUtf8 = 4,
  /*
   Unexpected internal panic; the handle is still valid.
   */
  QhtInternalPanic = 5,
} QhtStatus;

/*
 Opaque discrimination instance; create with one of the constructors and
 release with `qht_pair_free`.
 */
typedef struct QhtPair QhtPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread; valid until the
 next `qht_*` call from the same thread. Never null.
 */
const char *qht_last_error_message(void);

/*
 Load a pair from a JSON file path or a built-in fixture name
 (`equal_qubit`, `bern_half_quarter`, `qubit_tilted`).

 # Safety
 `spec` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum QhtStatus qht_pair_load(const char *spec, struct QhtPair **out);

/*
 Build a quantum pair from row-major interleaved complex entries
 (`[re, im]` per entry, so each matrix occupies `2 * dim * dim` doubles).

 # Safety
 `rho` and `eta` must point to `2 * dim * dim` readable doubles and
 `out` must be valid.
 */
enum QhtStatus qht_pair_from_dense(size_t dim,
                                   const double *rho,
                                   const double *eta,
                                   struct QhtPair **out);

/*
 Build a classical pair from two probability vectors of length `n`.

 # Safety
 `p` and `q` must point to `n` readable doubles and `out` must be valid.
 */
enum QhtStatus qht_pair_from_classical(size_t n,
                                       const double *p,
                                       const double *q,
                                       struct QhtPair **out);

/*
 Release a pair handle; null is a no-op.

 # Safety
 `pair` must come from a `qht_pair_*` constructor and not be freed twice.
 */
void qht_pair_free(struct QhtPair *pair);

/*
 Sandwiched Rényi divergence D*_α in nats, α ∈ (1, 1e6].

 # Safety
 `pair` must be a live handle and `out` a valid pointer.
 */
enum QhtStatus qht_sandwiched_renyi(const struct QhtPair *pair, double alpha, double *out);

/*
 Petz–Rényi divergence in nats, α ∈ (0,1) ∪ (1,2].

 # Safety
 `pair` must be a live handle and `out` a valid pointer.
 */
enum QhtStatus qht_petz_renyi(const struct QhtPair *pair, double alpha, double *out);

/*
 The α-norm Q*_α (linear domain).

 # Safety
 `pair` must be a live handle and `out` a valid pointer.
 */
enum QhtStatus qht_q_star(const struct QhtPair *pair, double alpha, double *out);

/*
 Umegaki relative entropy in nats.

 # Safety
 `pair` must be a live handle and `out` a valid pointer.
 */
enum QhtStatus qht_umegaki(const struct QhtPair *pair, double *out);

/*
 Max-relative entropy D*_∞ in nats.

 # Safety
 `pair` must be a live handle and `out` a valid pointer.
 */
enum QhtStatus qht_max_relative(const struct QhtPair *pair, double *out);

/*
 Hoeffding anti-divergence H*_r. `arg_alpha` receives the maximizing α,
 `1.0` on the degenerate r ≤ D₁ branch, or `INFINITY` when the supremum
 is approached as α → ∞.

 # Safety
 `pair` must be a live handle; each non-null out-pointer receives a value.
 */
enum QhtStatus qht_hoeffding(const struct QhtPair *pair,
                             double r,
                             double tol,
                             double *value,
                             double *arg_alpha,
                             double *truncation_bound);

/*
 Generalized κ-cutoff rate, κ ∈ (0, 1).

 # Safety
 `pair` must be a live handle and `out` a valid pointer.
 */
enum QhtStatus qht_cutoff_rate(const struct QhtPair *pair, double kappa, double tol, double *out);

/*
 Finite-n strong-converse exponent b_n(r) from the exact test solvers.

 # Safety
 `pair` must be a live handle and `b_n` a valid pointer.
 */
enum QhtStatus qht_finite_n_exponent(const struct QhtPair *pair,
                                     size_t n,
                                     double r,
                                     enum QhtEngine engine,
                                     double *b_n);

/*
 Order constant ln min{λ : ρ ≤ λη} of the pair.

 # Safety
 `pair` must be a live handle and `out` a valid pointer.
 */
enum QhtStatus qht_order_log(const struct QhtPair *pair, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QHT_H */
