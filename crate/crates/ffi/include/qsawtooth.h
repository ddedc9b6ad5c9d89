#ifndef QSAWTOOTH_H
#define QSAWTOOTH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Error model selector for [`qs_fidelity_trace`].
 */
typedef enum QsErrorMode {
  QS_ERROR_MODE_IDEAL = 0,
  QS_ERROR_MODE_STATIC = 1,
  QS_ERROR_MODE_NOISY_DETUNING = 2,
  QS_ERROR_MODE_RANDOM_ROTATION = 3,
} QsErrorMode;

typedef enum QsStatus {
  QS_STATUS_OK = 0,
  QS_STATUS_NULL_POINTER = 1,
  QS_STATUS_INVALID_ARGUMENT = 2,
  QS_STATUS_DIMENSION_MISMATCH = 3,
  QS_STATUS_BASIS_MISMATCH = 4,
  QS_STATUS_BUFFER_TOO_SMALL = 5,
  QS_STATUS_IO = 6,
  QS_STATUS_PANIC = 7,
  QS_STATUS_OTHER = 8,
} QsStatus;

/**
 * A gate sequence, optionally routed onto a lattice.
 */
typedef struct QsCircuit QsCircuit;

/**
 * A state vector in the momentum or angle basis.
 */
typedef struct QsRegister QsRegister;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *qs_last_error(void);

/**
 * Momentum eigenstate `|n⟩` (`n` in `[−N/2, N/2)`) on `n_qubits` qubits.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum QsStatus qs_register_momentum_eigenstate(size_t n_qubits, int64_t n, struct QsRegister **out);

/**
 * Copy of a register.
 *
 * # Safety
 * `reg` must be a live handle and `out` writable.
 */
enum QsStatus qs_register_clone(const struct QsRegister *reg, struct QsRegister **out);

/**
 * # Safety
 * `reg` must be null or a handle not yet freed.
 */
void qs_register_free(struct QsRegister *reg);

/**
 * Hilbert-space dimension `2^n_qubits`, or 0 for a null handle.
 *
 * # Safety
 * `reg` must be null or a live handle.
 */
size_t qs_register_dim(const struct QsRegister *reg);

/**
 * Copy amplitudes into `re` and `im`, each of length `len ≥ dim`.
 *
 * # Safety
 * `re` and `im` must point to `len` writable doubles.
 */
enum QsStatus qs_register_amplitudes(const struct QsRegister *reg,
                                     double *re,
                                     double *im,
                                     size_t len);

/**
 * `‖ψ‖`, or NaN for a null handle.
 *
 * # Safety
 * `reg` must be null or a live handle.
 */
double qs_register_norm(const struct QsRegister *reg);

/**
 * Apply `iterations` exact map steps with chaos parameter `chaos`.
 *
 * # Safety
 * `reg` must be a live handle.
 */
enum QsStatus qs_exact_iterate(struct QsRegister *reg, double chaos, size_t iterations);

/**
 * `|⟨a|b⟩|²`.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` writable.
 */
enum QsStatus qs_fidelity(const struct QsRegister *a, const struct QsRegister *b, double *out);

/**
 * Gate circuit for one map iteration, on the default square lattice.
 * With `routed` nonzero every two-qubit gate is made nearest-neighbour.
 *
 * # Safety
 * `out` must be writable.
 */
enum QsStatus qs_circuit_build_map(size_t n_qubits,
                                   double chaos,
                                   bool routed,
                                   struct QsCircuit **out);

/**
 * # Safety
 * `c` must be null or a handle not yet freed.
 */
void qs_circuit_free(struct QsCircuit *c);

/**
 * Timed gates (global phases excluded), or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t qs_circuit_gate_count(const struct QsCircuit *c);

/**
 * Apply the circuit once to a momentum-basis register.
 *
 * # Safety
 * `c` and `reg` must be live handles.
 */
enum QsStatus qs_circuit_apply(const struct QsCircuit *c, struct QsRegister *reg);

/**
 * One classical map step, in place.
 *
 * # Safety
 * `p` and `theta` must be writable.
 */
enum QsStatus qs_classical_step(double *p, double *theta, double k);

/**
 * Husimi density on an `n_theta × n_p` grid, rows of constant p, lowest
 * p first, written to `out` (length `len ≥ n_theta·n_p`).
 *
 * # Safety
 * `reg` must be a live handle and `out` point to `len` writable doubles.
 */
enum QsStatus qs_husimi(const struct QsRegister *reg,
                        size_t n_theta,
                        size_t n_p,
                        double s,
                        double *out,
                        size_t len);

/**
 * Fidelity of the routed circuit under an error model against the exact
 * evolution of `|⌊0.38 N⌋⟩`, for `t = 0..=t_max`. `coupling_ratio` is `J/δ`
 * for the static model and ignored otherwise. Writes `t_max + 1` values.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum QsStatus qs_fidelity_trace(size_t n_qubits,
                                double chaos,
                                enum QsErrorMode mode,
                                double epsilon,
                                double coupling_ratio,
                                size_t t_max,
                                uint64_t seed,
                                double *out,
                                size_t len);

/**
 * Initial register `|⌊0.38 N⌋⟩` used by the experiments.
 *
 * # Safety
 * `out` must be writable.
 */
enum QsStatus qs_register_default_initial(size_t n_qubits, struct QsRegister **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSAWTOOTH_H */
