#ifndef LINECELL_H
#define LINECELL_H

#include <stddef.h>
#include <stdint.h>

/*
 Scheduling rule for [`linecell_pfs_simulate`].
 */
typedef enum LinecellRule {
  LINECELL_RULE_ASYMPTOTIC_MAX_FADING = 0,
  LINECELL_RULE_LITERAL_PFS = 1,
} LinecellRule;

typedef enum LinecellStatus {
  LINECELL_STATUS_OK = 0,
  LINECELL_STATUS_NULL_POINTER = 1,
  LINECELL_STATUS_INVALID_ARGUMENT = 2,
  LINECELL_STATUS_DOMAIN = 3,
  /*
   The load is beyond the interference limit.
   */
  LINECELL_STATUS_LIMIT_EXCEEDED = 4,
  /*
   Quadrature, root finding or an iteration failed to converge.
   */
  LINECELL_STATUS_NUMERICAL = 5,
  /*
   A Rust panic was caught at the boundary.
   */
  LINECELL_STATUS_INTERNAL = 6,
} LinecellStatus;

/*
 Opaque parameter set.
 */
typedef struct LinecellParams LinecellParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *linecell_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *linecell_version(void);

/*
 Creates a parameter set. Free it with [`linecell_params_free`].

 # Safety
 `out` must be valid for a pointer write.
 */
enum LinecellStatus linecell_params_new(double alpha,
                                        double d,
                                        double delta,
                                        size_t m,
                                        struct LinecellParams **out);

/*
 Parameter set with the library defaults (alpha 2, D 2, delta 0.01, M 10).

 # Safety
 `out` must be valid for a pointer write.
 */
enum LinecellStatus linecell_params_default(struct LinecellParams **out);

/*
 # Safety
 `params` must come from [`linecell_params_new`] and not be used afterwards.
 Null is ignored.
 */
void linecell_params_free(struct LinecellParams *params);

/*
 Hurwitz zeta `sum_{n>=0} (n + q)^-a` for `a > 1`, `q > 0`.

 # Safety
 `out` must be valid for a write.
 */
enum LinecellStatus linecell_hurwitz_zeta(double a, double q, double *out);

/*
 Single-cell system Eb/N0 in dB at spectral efficiency `c`.

 # Safety
 `params` must be a live handle and `out` valid for a write.
 */
enum LinecellStatus linecell_sc_ebn0_db(const struct LinecellParams *params, double c, double *out);

/*
 Multi-cell system Eb/N0 in dB; `LimitExceeded` at or beyond C0.

 # Safety
 `params` must be a live handle and `out` valid for a write.
 */
enum LinecellStatus linecell_mc_ebn0_db(const struct LinecellParams *params, double c, double *out);

/*
 Spectral-efficiency limit C0 in bit/s/Hz.

 # Safety
 `params` must be a live handle and `out` valid for a write.
 */
enum LinecellStatus linecell_spectral_efficiency_limit(const struct LinecellParams *params,
                                                       double *out);

/*
 Effective interference ratio at `c` and its geometric bounds. `lower` and
 `upper` may be null.

 # Safety
 `params` must be a live handle; non-null pointers must be valid for writes.
 */
enum LinecellStatus linecell_beta_effective(const struct LinecellParams *params,
                                            double c,
                                            double *beta,
                                            double *lower,
                                            double *upper);

/*
 Partial-reuse system Eb/N0 in dB at load `c` and reuse radius `r0`.

 # Safety
 `params` must be a live handle and `out` valid for a write.
 */
enum LinecellStatus linecell_partial_ebn0_db(const struct LinecellParams *params,
                                             double c,
                                             double r0,
                                             double *out);

/*
 Reuse radius minimizing the partial-reuse Eb/N0 at `c`, and that Eb/N0 in dB.

 # Safety
 `params` must be a live handle; `r0` and `ebn0_db` valid for writes.
 */
enum LinecellStatus linecell_optimize_r0(const struct LinecellParams *params,
                                         double c,
                                         double *r0,
                                         double *ebn0_db);

/*
 Proportional-fair lower bound in bit/s/Hz.

 # Safety
 `params` must be a live handle and `out` valid for a write.
 */
enum LinecellStatus linecell_pfs_lower_bound(const struct LinecellParams *params,
                                             double rho,
                                             size_t k,
                                             double *out);

/*
 Proportional-fair two-cell upper bound; `std_error` may be null.

 # Safety
 `params` must be a live handle; non-null pointers valid for writes.
 */
enum LinecellStatus linecell_pfs_upper_bound(const struct LinecellParams *params,
                                             double rho,
                                             size_t k,
                                             size_t mc_samples,
                                             uint64_t seed,
                                             double *mean,
                                             double *std_error);

/*
 High-SNR proportional-fair limit on a ring of `n_cells`; `std_error` may be null.

 # Safety
 `params` must be a live handle; non-null pointers valid for writes.
 */
enum LinecellStatus linecell_pfs_capacity_limit(const struct LinecellParams *params,
                                                size_t k,
                                                size_t n_cells,
                                                size_t mc_samples,
                                                uint64_t seed,
                                                double *mean,
                                                double *std_error);

/*
 Ring simulation of proportional-fair scheduling with the default window
 (1000 slots) and one subchannel. `std_error` may be null.

 # Safety
 `params` must be a live handle; non-null pointers valid for writes.
 */
enum LinecellStatus linecell_pfs_simulate(const struct LinecellParams *params,
                                          size_t k,
                                          double rho,
                                          size_t n_cells,
                                          size_t n_slots,
                                          size_t trials,
                                          uint64_t seed,
                                          enum LinecellRule rule,
                                          double *c,
                                          double *std_error);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LINECELL_H */
