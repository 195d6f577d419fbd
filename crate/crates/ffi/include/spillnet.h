#ifndef SPILLNET_H
#define SPILLNET_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result of every fallible call.
 */
typedef enum SpillStatus {
  SPILL_STATUS_OK = 0,
  SPILL_STATUS_NULL_POINTER = 1,
  SPILL_STATUS_INVALID_ARGUMENT = 2,
  SPILL_STATUS_DATA_ERROR = 3,
  SPILL_STATUS_NUMERICAL_ERROR = 4,
  SPILL_STATUS_PANIC = 5,
} SpillStatus;

/*
 Position of the positive-semivariance block in a signed system.
 */
typedef enum SpillBlockOrder {
  SPILL_BLOCK_ORDER_POSITIVE_FIRST = 0,
  SPILL_BLOCK_ORDER_NEGATIVE_FIRST = 1,
} SpillBlockOrder;

/*
 Generalized variance decomposition.
 */
typedef struct SpillFevd SpillFevd;

/*
 Fitted VAR(p) model.
 */
typedef struct SpillVar SpillVar;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *spill_last_error(void);

/*
 Realized variance and semivariances of `n` intraday returns.

 # Safety
 `returns` must point to `n` doubles; the outputs must be valid or null
 (null outputs are an error).
 */
enum SpillStatus spill_realized_semivariances(const double *returns,
                                              size_t n,
                                              double *rv,
                                              double *rs_neg,
                                              double *rs_pos);

/*
 Fits a VAR(`lags`) with intercept to a `rows × cols` row-major data block.

 # Safety
 `data` must point to `rows * cols` doubles and `out` to writable storage
 for one handle.
 */
enum SpillStatus spill_var_fit(const double *data,
                               size_t rows,
                               size_t cols,
                               size_t lags,
                               struct SpillVar **out);

/*
 # Safety
 `var` must come from [`spill_var_fit`] and not be used afterwards.
 */
void spill_var_free(struct SpillVar *var);

/*
 Number of variables `k`; 0 for a null handle.

 # Safety
 `var` must be null or a live handle.
 */
size_t spill_var_dim(const struct SpillVar *var);

/*
 Lag order `p`; 0 for a null handle.

 # Safety
 `var` must be null or a live handle.
 */
size_t spill_var_lag_order(const struct SpillVar *var);

/*
 Copies `Φ_lag` (`lag` in `1..=p`) into `out` as `k × k` row-major.

 # Safety
 `var` must be a live handle and `out` must hold `k * k` doubles.
 */
enum SpillStatus spill_var_phi(const struct SpillVar *var, size_t lag, double *out);

/*
 Copies the residual covariance into `out` as `k × k` row-major.

 # Safety
 `var` must be a live handle and `out` must hold `k * k` doubles.
 */
enum SpillStatus spill_var_sigma(const struct SpillVar *var, double *out);

/*
 Copies the intercept (`k` values) into `out`.

 # Safety
 `var` must be a live handle and `out` must hold `k` doubles.
 */
enum SpillStatus spill_var_intercept(const struct SpillVar *var, double *out);

/*
 Spectral radius of the companion matrix; the model is stationary when it
 is below one.

 # Safety
 `var` must be a live handle and `out` writable.
 */
enum SpillStatus spill_var_spectral_radius(const struct SpillVar *var, double *out);

/*
 Decomposition at `horizon` for a fitted model.

 # Safety
 `var` must be a live handle and `out` writable.
 */
enum SpillStatus spill_gfevd_from_var(const struct SpillVar *var,
                                      size_t horizon,
                                      struct SpillFevd **out);

/*
 Decomposition at `horizon` from `p` stacked `k × k` row-major coefficient
 matrices (`Φ_1` first) and a `k × k` row-major covariance.

 # Safety
 `phi` must hold `p * k * k` doubles, `sigma` `k * k`, and `out` must be
 writable.
 */
enum SpillStatus spill_gfevd(const double *phi,
                             size_t k,
                             size_t p,
                             const double *sigma,
                             size_t horizon,
                             struct SpillFevd **out);

/*
 # Safety
 `fevd` must come from a `spill_gfevd*` call and not be used afterwards.
 */
void spill_fevd_free(struct SpillFevd *fevd);

/*
 System dimension; 0 for a null handle.

 # Safety
 `fevd` must be null or a live handle.
 */
size_t spill_fevd_dim(const struct SpillFevd *fevd);

/*
 Copies the row-normalized decomposition (fractions, rows sum to one) into
 `out` as `k × k` row-major.

 # Safety
 `fevd` must be a live handle and `out` must hold `k * k` doubles.
 */
enum SpillStatus spill_fevd_normalized(const struct SpillFevd *fevd, double *out);

/*
 Total spillover index in percent.

 # Safety
 `fevd` must be a live handle and `out` writable.
 */
enum SpillStatus spill_total(const struct SpillFevd *fevd, double *out);

/*
 Spillover transmitted by variable `i` (0-based) to all others, percent.

 # Safety
 `fevd` must be a live handle and `out` writable.
 */
enum SpillStatus spill_to(const struct SpillFevd *fevd, size_t i, double *out);

/*
 Spillover received by variable `i` (0-based) from all others, percent.

 # Safety
 `fevd` must be a live handle and `out` writable.
 */
enum SpillStatus spill_from(const struct SpillFevd *fevd, size_t i, double *out);

/*
 TO minus FROM for variable `i` (0-based).

 # Safety
 `fevd` must be a live handle and `out` writable.
 */
enum SpillStatus spill_net(const struct SpillFevd *fevd, size_t i, double *out);

/*
 Signed-system TO for column `col` (0-based), excluding the diagonal and
 the same asset's opposite-sign entry.

 # Safety
 `fevd` must be a live handle and `out` writable.
 */
enum SpillStatus spill_signed_to(const struct SpillFevd *fevd,
                                 size_t n_assets,
                                 enum SpillBlockOrder order,
                                 size_t col,
                                 double *out);

/*
 Spillover asymmetry measure: good-volatility TO minus bad-volatility TO.

 # Safety
 `fevd` must be a live handle and `out` writable.
 */
enum SpillStatus spill_sam(const struct SpillFevd *fevd,
                           size_t n_assets,
                           enum SpillBlockOrder order,
                           double *out);

/*
 Directional asymmetry for asset `i` (0-based).

 # Safety
 `fevd` must be a live handle and `out` writable.
 */
enum SpillStatus spill_dsam(const struct SpillFevd *fevd,
                            size_t n_assets,
                            enum SpillBlockOrder order,
                            size_t i,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPILLNET_H */
