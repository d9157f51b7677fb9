#ifndef QUBO_LINSYS_H
#define QUBO_LINSYS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QlFormat {
  QL_FORMAT_COORDINATE = 0,
  QL_FORMAT_VENDOR_SCRIPT = 1,
} QlFormat;

typedef enum QlStatus {
  QL_STATUS_OK = 0,
  QL_STATUS_NULL_POINTER = 1,
  QL_STATUS_INVALID_UTF8 = 2,
  QL_STATUS_PARSE = 3,
  QL_STATUS_CONFIG = 4,
  QL_STATUS_DIMENSION = 5,
  QL_STATUS_INDEX = 6,
  QL_STATUS_UNSUPPORTED = 7,
  QL_STATUS_CAPACITY = 8,
  QL_STATUS_EMPTY = 9,
  QL_STATUS_IO = 10,
  QL_STATUS_OVERFLOW = 11,
  QL_STATUS_PANIC = 12,
} QlStatus;

/**
 * Compiled models of one problem file. An eigen file without a fixed
 * eigenvalue sign compiles to two models.
 */
typedef struct QlProblem QlProblem;

typedef struct QlSampleSet QlSampleSet;

typedef struct QlAnnealParams {
  size_t sweeps;
  size_t reads;
  double beta_start;
  double beta_end;
  uint64_t seed;
} QlAnnealParams;

typedef struct QlCost {
  uint64_t pair_count;
  uint64_t per_pair_total;
  uint64_t grand_total;
} QlCost;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into this library.
 */
const char *ql_last_error(void);

/**
 * Parses and compiles a JSON problem description.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum QlStatus ql_problem_from_json(const char *json, struct QlProblem **out);

/**
 * Reads, parses and compiles a JSON problem file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum QlStatus ql_problem_load(const char *path, struct QlProblem **out);

/**
 * # Safety
 * `p` must be NULL or a handle from `ql_problem_from_json`/`ql_problem_load`
 * that has not been freed.
 */
void ql_problem_free(struct QlProblem *p);

/**
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum QlStatus ql_problem_num_models(const struct QlProblem *p, size_t *out);

/**
 * Number of unknowns `n`, the length `x_out` must have in [`ql_problem_decode`].
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum QlStatus ql_problem_num_unknowns(const struct QlProblem *p, size_t *out);

/**
 * Total qubit count of one model, auxiliaries included.
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum QlStatus ql_problem_num_qubits(const struct QlProblem *p, size_t model_index, size_t *out);

/**
 * Constant term of one model.
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum QlStatus ql_problem_offset(const struct QlProblem *p, size_t model_index, double *out);

/**
 * Label of one model as a new string; release it with [`ql_string_free`].
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum QlStatus ql_problem_label(const struct QlProblem *p, size_t model_index, char **out);

/**
 * Energy of a bitstring, offset included.
 *
 * # Safety
 * `p` must be a live problem handle, `bits` must point to `len` bytes and
 * `out` must be a valid pointer.
 */
enum QlStatus ql_problem_energy(const struct QlProblem *p,
                                size_t model_index,
                                const uint8_t *bits,
                                size_t len,
                                double *out);

/**
 * Decodes a bitstring into `x_out` (length `x_len`, which must equal the
 * number of unknowns). `lambda_out` receives the eigenvalue for eigen models
 * and NaN otherwise; `residual_out` receives `||Ax - b||` or `||Ax - lambda x||`.
 * Either of the two scalar outputs may be NULL.
 *
 * # Safety
 * `p` must be a live problem handle, `bits` must point to `len` bytes,
 * `x_out` to `x_len` writable doubles, and the scalar outputs must be NULL or valid.
 */
enum QlStatus ql_problem_decode(const struct QlProblem *p,
                                size_t model_index,
                                const uint8_t *bits,
                                size_t len,
                                double *x_out,
                                size_t x_len,
                                double *lambda_out,
                                double *residual_out);

/**
 * Exports one model as text; release the result with [`ql_string_free`].
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum QlStatus ql_problem_export(const struct QlProblem *p,
                                size_t model_index,
                                enum QlFormat format,
                                bool include_zeros,
                                char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library that has not been freed.
 */
void ql_string_free(char *s);

/**
 * Every ground state of one model by exhaustive enumeration (at most 25 qubits).
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum QlStatus ql_solve_exhaustive(const struct QlProblem *p,
                                  size_t model_index,
                                  struct QlSampleSet **out);

struct QlAnnealParams ql_anneal_params_default(void);

/**
 * Simulated annealing on one model; identical parameters give identical results.
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum QlStatus ql_solve_sa(const struct QlProblem *p,
                          size_t model_index,
                          struct QlAnnealParams params,
                          struct QlSampleSet **out);

/**
 * # Safety
 * `s` must be NULL or a sample set handle that has not been freed.
 */
void ql_sampleset_free(struct QlSampleSet *s);

/**
 * Number of distinct records, sorted by energy then bitstring.
 *
 * # Safety
 * `s` must be a live sample set handle and `out` a valid pointer.
 */
enum QlStatus ql_sampleset_len(const struct QlSampleSet *s, size_t *out);

/**
 * # Safety
 * `s` must be a live sample set handle and `out` a valid pointer.
 */
enum QlStatus ql_sampleset_energy(const struct QlSampleSet *s, size_t index, double *out);

/**
 * # Safety
 * `s` must be a live sample set handle and `out` a valid pointer.
 */
enum QlStatus ql_sampleset_occurrences(const struct QlSampleSet *s, size_t index, uint64_t *out);

/**
 * Copies the bits of one record into `out`, which must hold exactly the
 * model's qubit count.
 *
 * # Safety
 * `s` must be a live sample set handle and `out` must point to `len` writable bytes.
 */
enum QlStatus ql_sampleset_bits(const struct QlSampleSet *s,
                                size_t index,
                                uint8_t *out,
                                size_t len);

/**
 * Assembly cost triple for dimension `n` and exponent half-width `m`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QlStatus ql_estimate_cost(uint64_t n, uint64_t m, struct QlCost *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUBO_LINSYS_H */
